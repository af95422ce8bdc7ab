#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "evigrid/raycast.hpp"

namespace {

using namespace evigrid;

void BM_Traverse3D(benchmark::State& state) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  VoxelGridGeometry grid;
  grid.edge = 0.125;
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> rays;
  for (int i = 0; i < 1024; ++i) {
    rays.emplace_back(Eigen::Vector3d(u(rng), u(rng), u(rng)),
                      Eigen::Vector3d(u(rng), u(rng), u(rng)));
  }
  std::size_t i = 0;
  std::uint64_t visited = 0;
  for (auto _ : state) {
    const auto& [a, b] = rays[i++ & 1023];
    for_each_voxel_on_segment(a, b, grid,
                              [&](const VoxelIndex&) { ++visited; });
  }
  benchmark::DoNotOptimize(visited);
  state.SetItemsProcessed(static_cast<std::int64_t>(visited));
}
BENCHMARK(BM_Traverse3D);

void BM_Traverse2D(benchmark::State& state) {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  CellGridGeometry grid;
  grid.edge = 0.125;
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> rays;
  for (int i = 0; i < 1024; ++i) {
    rays.emplace_back(Eigen::Vector2d(0.0, 0.0),
                      Eigen::Vector2d(u(rng), u(rng)));
  }
  std::size_t i = 0;
  std::uint64_t visited = 0;
  for (auto _ : state) {
    const auto& [a, b] = rays[i++ & 1023];
    for_each_cell_on_segment(a, b, grid, [&](const CellIndex&) { ++visited; });
  }
  benchmark::DoNotOptimize(visited);
  state.SetItemsProcessed(static_cast<std::int64_t>(visited));
}
BENCHMARK(BM_Traverse2D);

}  // namespace
