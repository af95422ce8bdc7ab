#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace evigrid {

// Coordinate convention: right-handed frame, z up. All distances in meters.

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;  // reflectance, always in [0, 1]

  Point3() = default;
  // Throws std::invalid_argument on non-finite coordinates or intensity
  // outside [0, 1].
  Point3(double x, double y, double z, double intensity = 0.0);

  Eigen::Vector3d position() const { return {x, y, z}; }
};

struct PointCloud {
  std::vector<Point3> points;
  Point3 sensor_origin{};    // frame-local ray origin, typically zero
  double timestamp = 0.0;    // seconds on the sequence clock
  std::string scan_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct PoseSE3;

struct ScanSequence {
  std::vector<PointCloud> scans;  // ordered by strictly increasing timestamp
  std::vector<PoseSE3> poses;     // empty, or exactly one pose per scan

  bool has_poses() const;
  // Throws std::invalid_argument if timestamps are not strictly increasing,
  // scan ids collide, or the pose list length mismatches.
  void validate() const;
};

}  // namespace evigrid
