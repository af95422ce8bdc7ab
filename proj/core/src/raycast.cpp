#include "evigrid/raycast.hpp"

namespace evigrid {

std::vector<VoxelIndex> traverse_voxels_3d(const Eigen::Vector3d& origin,
                                           const Eigen::Vector3d& endpoint,
                                           const VoxelGridGeometry& grid) {
  std::vector<VoxelIndex> out;
  for_each_voxel_on_segment(origin, endpoint, grid,
                            [&](const VoxelIndex& v) { out.push_back(v); });
  return out;
}

std::vector<CellIndex> traverse_cells_2d(const Eigen::Vector2d& origin,
                                         const Eigen::Vector2d& endpoint,
                                         const CellGridGeometry& grid) {
  std::vector<CellIndex> out;
  for_each_cell_on_segment(origin, endpoint, grid,
                           [&](const CellIndex& c) { out.push_back(c); });
  return out;
}

}  // namespace evigrid
