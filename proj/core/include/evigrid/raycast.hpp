#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "evigrid/grid.hpp"

namespace evigrid {

// Incremental grid traversal. Visits every voxel/cell the segment passes
// through exactly once, in order, starting at the origin's voxel and ending
// at the endpoint's voxel; consecutive entries are face-adjacent. Corner
// crossings are resolved by stepping the lower axis first, which matches the
// half-open binning convention in grid.hpp.

template <typename Visit>
inline void for_each_voxel_on_segment(const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& endpoint,
                                      const VoxelGridGeometry& grid,
                                      Visit&& visit) {
  if (origin == endpoint) {
    throw std::invalid_argument("voxel traversal: zero-length ray");
  }
  VoxelIndex cur = grid.voxel_of(origin);
  const VoxelIndex target = grid.voxel_of(endpoint);
  const Eigen::Vector3d d = endpoint - origin;

  std::int32_t idx[3] = {cur.x, cur.y, cur.z};
  const std::int32_t tgt[3] = {target.x, target.y, target.z};
  std::int32_t step[3];
  double t_max[3], t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      const double boundary = grid.origin[a] + (idx[a] + 1) * grid.edge;
      t_max[a] = (boundary - origin[a]) / d[a];
      t_delta[a] = grid.edge / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      const double boundary = grid.origin[a] + idx[a] * grid.edge;
      t_max[a] = (boundary - origin[a]) / d[a];
      t_delta[a] = -grid.edge / d[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  visit(cur);
  if (cur == target) return;

  long guard = std::labs(static_cast<long>(tgt[0]) - idx[0]) +
               std::labs(static_cast<long>(tgt[1]) - idx[1]) +
               std::labs(static_cast<long>(tgt[2]) - idx[2]) + 8;
  while (guard-- > 0) {
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    // Index motion is monotone, so an axis that has reached the endpoint's
    // bin never legitimately steps again; rounding near a face could
    // otherwise walk past the target.
    if (idx[a] == tgt[a]) {
      t_max[a] = std::numeric_limits<double>::infinity();
      continue;
    }
    idx[a] += step[a];
    t_max[a] += t_delta[a];
    cur = {idx[0], idx[1], idx[2]};
    visit(cur);
    if (cur == target) return;
  }
  throw std::runtime_error("voxel traversal: endpoint voxel not reached");
}

template <typename Visit>
inline void for_each_cell_on_segment(const Eigen::Vector2d& origin,
                                     const Eigen::Vector2d& endpoint,
                                     const CellGridGeometry& grid,
                                     Visit&& visit) {
  if (origin == endpoint) {
    throw std::invalid_argument("cell traversal: zero-length ray");
  }
  CellIndex cur = grid.cell_of(origin);
  const CellIndex target = grid.cell_of(endpoint);
  const Eigen::Vector2d d = endpoint - origin;

  std::int32_t idx[2] = {cur.x, cur.y};
  const std::int32_t tgt[2] = {target.x, target.y};
  std::int32_t step[2];
  double t_max[2], t_delta[2];
  for (int a = 0; a < 2; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      const double boundary = grid.origin[a] + (idx[a] + 1) * grid.edge;
      t_max[a] = (boundary - origin[a]) / d[a];
      t_delta[a] = grid.edge / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      const double boundary = grid.origin[a] + idx[a] * grid.edge;
      t_max[a] = (boundary - origin[a]) / d[a];
      t_delta[a] = -grid.edge / d[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  visit(cur);
  if (cur == target) return;

  long guard = std::labs(static_cast<long>(tgt[0]) - idx[0]) +
               std::labs(static_cast<long>(tgt[1]) - idx[1]) + 8;
  while (guard-- > 0) {
    const int a = t_max[1] < t_max[0] ? 1 : 0;
    if (idx[a] == tgt[a]) {
      t_max[a] = std::numeric_limits<double>::infinity();
      continue;
    }
    idx[a] += step[a];
    t_max[a] += t_delta[a];
    cur = {idx[0], idx[1]};
    visit(cur);
    if (cur == target) return;
  }
  throw std::runtime_error("cell traversal: endpoint cell not reached");
}

std::vector<VoxelIndex> traverse_voxels_3d(const Eigen::Vector3d& origin,
                                           const Eigen::Vector3d& endpoint,
                                           const VoxelGridGeometry& grid);

std::vector<CellIndex> traverse_cells_2d(const Eigen::Vector2d& origin,
                                         const Eigen::Vector2d& endpoint,
                                         const CellGridGeometry& grid);

}  // namespace evigrid
