#pragma once

#include <cstdint>
#include <string>

#include "evigrid/evidence.hpp"
#include "evigrid/gicp.hpp"
#include "evigrid/grid_map.hpp"
#include "evigrid/ground.hpp"
#include "evigrid/registration.hpp"

namespace evigrid {

// Every tunable of the pipeline in one serializable bundle. The effective
// configuration of a run is echoed next to each output.
struct PipelineConfig {
  double voxel_edge = 0.125;
  double cell_edge = 0.125;
  double map_extent = 100.0;  // meters, square map centered on the sensor
  std::int32_t crop_size = 512;

  double window_seconds = 2.0;
  double corridor_low = 0.2;
  double corridor_high = 3.0;
  double ground_band = 0.2;
  double multipath_cutoff = -0.2;
  double cauchy_scale = 0.05;

  std::size_t gicp_batch = 6;
  double gicp_max_distance = 1.0;
  std::size_t covariance_k = 10;
  double covariance_epsilon = 1e-3;

  SensorEvidenceConfig evidence;

  double metric_certainty_k = 0.0;
  double metric_asym_k = 0.0;
  int metric_asym_sign = 1;
  double rel_unc_eps = 1e-6;

  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 0;

  static PipelineConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  // Derived option bundles.
  GridSpec2D map_spec(const Eigen::Vector2d& center = {0.0, 0.0}) const;
  PlaneFitOptions plane_fit_options() const;
  InputGridParams input_grid_params() const;
  TargetGridParams target_grid_params() const;
  SequenceRegistrationOptions registration_options() const;
};

}  // namespace evigrid
