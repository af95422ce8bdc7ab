#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evigrid/ground.hpp"
#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid::synth {

struct BoxSpec {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  Eigen::Vector3d size{1.0, 1.0, 1.0};  // full edge lengths
  double reflectivity = 0.5;
  Eigen::Vector3d velocity{0.0, 0.0, 0.0};  // m/s, center at time t is
                                            // center + velocity * t
};

struct CylinderSpec {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.2;
  double z_min = 0.0;
  double z_max = 2.0;
  double reflectivity = 0.5;
  Eigen::Vector2d velocity{0.0, 0.0};
};

struct TrajectoryKnot {
  double t = 0.0;
  PoseSE3 pose;
};

struct SensorModel {
  int azimuth_count = 360;
  int elevation_count = 16;
  double azimuth_start = 0.0;              // radians, span covered exclusive
  double azimuth_span = 2.0 * 3.14159265358979323846;
  double elevation_min = -0.45;            // radians
  double elevation_max = 0.05;
  double max_range = 50.0;                 // meters
  double noise_sigma = 0.0;                // range noise, meters
  std::uint64_t seed = 0;
};

struct SceneSpec {
  PlaneParams ground;
  double ground_reflectivity = 0.3;
  std::vector<BoxSpec> boxes;
  std::vector<CylinderSpec> cylinders;
  std::vector<TrajectoryKnot> trajectory;  // strictly increasing t
  SensorModel sensor;
};

// Label of a simulated point: kGroundLabel for ground returns, otherwise the
// primitive index (boxes first, then cylinders).
constexpr int kGroundLabel = -1;

struct LabeledScan {
  PointCloud cloud;  // sensor frame, sensor_origin at zero
  std::vector<int> labels;
};

// Pose interpolated along the trajectory (linear translation, slerp
// rotation). Throws std::invalid_argument outside the knot span.
PoseSE3 pose_at(const SceneSpec& scene, double t);

// Casts the sensor's ray fan from the trajectory pose at t against all
// primitives; nearest hit wins, range noise is drawn from a per-ray stream
// derived from (seed, t, ray index), so the result is a pure function of the
// scene and t.
LabeledScan simulate_scan(const SceneSpec& scene, double t);

struct SimulatedSequence {
  ScanSequence sequence;                 // poses left empty
  std::vector<PoseSE3> ground_truth;     // one per scan
  std::vector<std::vector<int>> labels;  // one list per scan
};

SimulatedSequence simulate_sequence(const SceneSpec& scene, double rate_hz,
                                    double duration_s);

SceneSpec scene_from_json(const std::string& json_text);
std::string scene_to_json(const SceneSpec& scene);

}  // namespace evigrid::synth
