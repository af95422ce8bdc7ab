#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "evigrid/evidence.hpp"

namespace {

using namespace evigrid;

void BM_CombineCounts(benchmark::State& state) {
  const SensorEvidenceConfig config;
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::uint32_t> c(0, 60);
  std::vector<VoxelCounts> counts(4096);
  for (auto& v : counts) v = {c(rng), c(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(combine_counts(counts[i++ & 4095], config));
  }
}
BENCHMARK(BM_CombineCounts);

void BM_ProjectPillar(benchmark::State& state) {
  const SensorEvidenceConfig config;
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::uint32_t> c(0, 20);
  std::vector<EvidenceMass> pillar(static_cast<std::size_t>(state.range(0)));
  for (auto& m : pillar) m = combine_counts({c(rng), c(rng)}, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_pillar(pillar));
  }
}
BENCHMARK(BM_ProjectPillar)->Arg(4)->Arg(22);

}  // namespace
