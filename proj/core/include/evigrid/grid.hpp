#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace evigrid {

struct VoxelIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

struct CellIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Binning convention: half-open intervals [low, high) per axis, so a point
// exactly on a voxel face belongs to the voxel with the larger index.
struct VoxelGridGeometry {
  Eigen::Vector3d origin{0.0, 0.0, 0.0};
  double edge = 0.125;

  VoxelIndex voxel_of(const Eigen::Vector3d& p) const {
    return {static_cast<std::int32_t>(std::floor((p.x() - origin.x()) / edge)),
            static_cast<std::int32_t>(std::floor((p.y() - origin.y()) / edge)),
            static_cast<std::int32_t>(std::floor((p.z() - origin.z()) / edge))};
  }
  Eigen::Vector3d center_of(const VoxelIndex& v) const {
    return origin + edge * Eigen::Vector3d(v.x + 0.5, v.y + 0.5, v.z + 0.5);
  }
};

struct CellGridGeometry {
  Eigen::Vector2d origin{0.0, 0.0};
  double edge = 0.125;

  CellIndex cell_of(const Eigen::Vector2d& p) const {
    return {static_cast<std::int32_t>(std::floor((p.x() - origin.x()) / edge)),
            static_cast<std::int32_t>(std::floor((p.y() - origin.y()) / edge))};
  }
  Eigen::Vector2d center_of(const CellIndex& c) const {
    return origin + edge * Eigen::Vector2d(c.x + 0.5, c.y + 0.5);
  }
};

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const {
    std::uint64_t h = static_cast<std::uint32_t>(v.x);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(v.y);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(v.z);
    return static_cast<std::size_t>(h * 0x2545F4914F6CDD1Dull);
  }
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const {
    std::uint64_t h = static_cast<std::uint32_t>(c.x);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(c.y);
    return static_cast<std::size_t>(h * 0x2545F4914F6CDD1Dull);
  }
};

}  // namespace evigrid
