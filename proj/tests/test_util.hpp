#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid::testing {

inline PoseSE3 random_pose(std::mt19937& rng, double max_translation = 2.0,
                           double max_angle = 1.5) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::Vector3d axis(unit(rng), unit(rng), unit(rng));
  if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
  axis.normalize();
  std::uniform_real_distribution<double> angle(-max_angle, max_angle);
  std::uniform_real_distribution<double> trans(-max_translation, max_translation);
  return {Eigen::Quaterniond(Eigen::AngleAxisd(angle(rng), axis)),
          Eigen::Vector3d(trans(rng), trans(rng), trans(rng))};
}

inline std::vector<Point3> random_points(std::mt19937& rng, std::size_t count,
                                         double extent = 10.0) {
  std::uniform_real_distribution<double> coord(-extent, extent);
  std::vector<Point3> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    points.emplace_back(coord(rng), coord(rng), coord(rng), 0.5);
  }
  return points;
}

inline PoseSE3 yaw_pose(double yaw, const Eigen::Vector3d& t) {
  return {Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())),
          t};
}

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("evigrid_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace evigrid::testing
