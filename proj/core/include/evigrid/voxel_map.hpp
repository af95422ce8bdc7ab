#pragma once

#include <cstdint>
#include <unordered_map>

#include "evigrid/evidence.hpp"
#include "evigrid/grid.hpp"
#include "evigrid/ground.hpp"
#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid {

// Sparse 3D grid of reflection/transmission counts. Only voxels with at
// least one observation are stored; counts only grow.
class EvidentialVoxelMap {
 public:
  using Storage = std::unordered_map<VoxelIndex, VoxelCounts, VoxelIndexHash>;

  explicit EvidentialVoxelMap(const VoxelGridGeometry& geometry)
      : geometry_(geometry) {}

  const VoxelGridGeometry& geometry() const { return geometry_; }
  const Storage& voxels() const { return voxels_; }
  std::size_t size() const { return voxels_.size(); }

  VoxelCounts counts_at(const VoxelIndex& v) const {
    const auto it = voxels_.find(v);
    return it == voxels_.end() ? VoxelCounts{} : it->second;
  }

  void add_reflection(const VoxelIndex& v) {
    ++voxels_[v].reflections;
    ++total_reflections_;
  }
  void add_transmission(const VoxelIndex& v) {
    ++voxels_[v].transmissions;
    ++total_transmissions_;
  }
  void insert(const VoxelIndex& v, const VoxelCounts& c) {
    if (c.reflections == 0 && c.transmissions == 0) return;
    VoxelCounts& dst = voxels_[v];
    dst.reflections += c.reflections;
    dst.transmissions += c.transmissions;
    total_reflections_ += c.reflections;
    total_transmissions_ += c.transmissions;
  }

  std::uint64_t total_reflections() const { return total_reflections_; }
  std::uint64_t total_transmissions() const { return total_transmissions_; }

 private:
  VoxelGridGeometry geometry_;
  Storage voxels_;
  std::uint64_t total_reflections_ = 0;
  std::uint64_t total_transmissions_ = 0;
};

struct AccumulateStats {
  std::size_t rays = 0;
  std::size_t skipped_zero_length = 0;
};

// Casts one ray per point from the transformed sensor origin to the
// transformed endpoint: every voxel strictly before the endpoint voxel gets a
// transmission, the endpoint voxel gets the reflection. Rays whose origin and
// endpoint coincide exactly are skipped and counted.
AccumulateStats accumulate_scan(EvidentialVoxelMap& map,
                                const PointCloud& scan, const PoseSE3& pose);

// Keeps voxels whose center height above the plane lies in [low, high].
EvidentialVoxelMap segment_corridor(const EvidentialVoxelMap& map,
                                    const PlaneParams& plane,
                                    double low = 0.2, double high = 3.0);

}  // namespace evigrid
