#include "evigrid/voxel_map.hpp"

#include "evigrid/raycast.hpp"

namespace evigrid {

AccumulateStats accumulate_scan(EvidentialVoxelMap& map,
                                const PointCloud& scan, const PoseSE3& pose) {
  AccumulateStats stats;
  const Eigen::Vector3d origin = pose.apply(scan.sensor_origin.position());
  const VoxelGridGeometry& geom = map.geometry();
  for (const Point3& p : scan.points) {
    const Eigen::Vector3d endpoint = pose.apply(p.position());
    if (endpoint == origin) {
      ++stats.skipped_zero_length;
      continue;
    }
    ++stats.rays;
    const VoxelIndex hit = geom.voxel_of(endpoint);
    for_each_voxel_on_segment(origin, endpoint, geom, [&](const VoxelIndex& v) {
      if (v == hit) {
        map.add_reflection(v);
      } else {
        map.add_transmission(v);
      }
    });
  }
  return stats;
}

EvidentialVoxelMap segment_corridor(const EvidentialVoxelMap& map,
                                    const PlaneParams& plane,
                                    double low, double high) {
  EvidentialVoxelMap out(map.geometry());
  for (const auto& [index, counts] : map.voxels()) {
    const double h = plane.height(map.geometry().center_of(index));
    if (h >= low && h <= high) out.insert(index, counts);
  }
  return out;
}

}  // namespace evigrid
