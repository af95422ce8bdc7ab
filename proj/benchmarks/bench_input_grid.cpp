#include <benchmark/benchmark.h>

#include "evigrid/grid_map.hpp"
#include "evigrid/ground.hpp"
#include "evigrid/synth.hpp"

namespace {

using namespace evigrid;

// The full single-scan rasterization path on a 100k-point scan, the hot
// operation of the pipeline.
void BM_BuildInputGrid(benchmark::State& state) {
  synth::SceneSpec scene;
  scene.boxes.push_back({{8.0, 3.0, 1.0}, {2.0, 3.0, 2.0}, 0.8, Eigen::Vector3d::Zero()});
  scene.boxes.push_back({{-7.0, 2.0, 1.25}, {2.5, 2.0, 2.5}, 0.6, Eigen::Vector3d::Zero()});
  scene.cylinders.push_back({{2.0, 9.0}, 0.3, 0.0, 3.0, 0.5, Eigen::Vector2d::Zero()});
  scene.trajectory = {{0.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(0, 0, 1.5))}};
  scene.sensor.azimuth_count = 500;
  scene.sensor.elevation_count = 200;
  scene.sensor.elevation_min = -0.7;
  scene.sensor.elevation_max = 0.05;
  scene.sensor.max_range = 60.0;
  scene.sensor.noise_sigma = 0.01;
  scene.sensor.seed = 3;

  const PointCloud scan = synth::simulate_scan(scene, 0.0).cloud;
  const PlaneParams plane = fit_plane(scan.points);
  const GridSpec2D spec = GridSpec2D::centered({0.0, 0.0}, 100.0, 0.125);

  for (auto _ : state) {
    benchmark::DoNotOptimize(build_input_grid(scan, plane, spec, {}));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(scan.size()));
}
BENCHMARK(BM_BuildInputGrid)->Unit(benchmark::kMillisecond);

}  // namespace
