#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evigrid/evidence.hpp"
#include "evigrid/grid.hpp"
#include "evigrid/ground.hpp"
#include "evigrid/types.hpp"
#include "evigrid/voxel_map.hpp"

namespace evigrid {

// Placement and shape of a bounded 2D grid. Cell (0, 0) covers the square
// with lower corner at origin; index grows with +x / +y.
struct GridSpec2D {
  Eigen::Vector2d origin{-50.0, -50.0};
  double cell_edge = 0.125;
  std::int32_t width = 800;
  std::int32_t height = 800;

  static GridSpec2D centered(const Eigen::Vector2d& center, double extent,
                             double cell_edge);

  CellGridGeometry cell_geometry() const { return {origin, cell_edge}; }
  bool contains(const CellIndex& c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  std::size_t flat(const CellIndex& c) const {
    return static_cast<std::size_t>(c.y) * width + c.x;
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  Eigen::Vector2d center() const {
    return origin + 0.5 * cell_edge * Eigen::Vector2d(width, height);
  }
  bool same_shape(const GridSpec2D& o) const;
};

struct BeliefCell {
  double occupied = 0.0;
  double free = 0.0;
};

// Two-channel evidential grid: per cell the beliefs in occupied and free.
// Cells never touched by any observation stay at (0, 0), full uncertainty.
class BeliefGrid {
 public:
  explicit BeliefGrid(const GridSpec2D& spec)
      : spec_(spec), cells_(spec.cell_count()) {}

  const GridSpec2D& spec() const { return spec_; }
  const std::vector<BeliefCell>& cells() const { return cells_; }
  std::vector<BeliefCell>& cells() { return cells_; }

  BeliefCell& at(const CellIndex& c) { return cells_[spec_.flat(c)]; }
  const BeliefCell& at(const CellIndex& c) const { return cells_[spec_.flat(c)]; }

 private:
  GridSpec2D spec_;
  std::vector<BeliefCell> cells_;
};

// Single-scan input grid: detections, free-space transmissions and mean
// endpoint intensity, each split into a ground and a non-ground family.
class MultiLayerGridMap {
 public:
  static constexpr std::array<const char*, 6> kLayerNames = {
      "detections_ground",    "detections_non_ground",
      "transmissions_ground", "transmissions_non_ground",
      "intensity_ground",     "intensity_non_ground"};

  explicit MultiLayerGridMap(const GridSpec2D& spec);

  const GridSpec2D& spec() const { return spec_; }

  std::vector<std::uint32_t> detections_ground;
  std::vector<std::uint32_t> detections_non_ground;
  std::vector<std::uint32_t> transmissions_ground;
  std::vector<std::uint32_t> transmissions_non_ground;
  std::vector<double> intensity_ground;      // mean in [0, 1], 0 if no detection
  std::vector<double> intensity_non_ground;

 private:
  GridSpec2D spec_;
};

struct InputGridParams {
  double ground_band = 0.2;
  double multipath_cutoff = -0.2;
};

// Rasterizes one scan into the six-layer grid: points are split by the ground
// plane, rays run in the grid plane from the sensor origin to each endpoint,
// transmissions cover the cells strictly before the endpoint cell. Cells
// outside the grid are ignored; a detection landing outside drops only its
// detection, not the in-grid part of its ray.
MultiLayerGridMap build_input_grid(const PointCloud& scan,
                                   const PlaneParams& plane,
                                   const GridSpec2D& spec,
                                   const InputGridParams& params = {});

struct TargetGridParams {
  double window_seconds = 2.0;
  double corridor_low = 0.2;
  double corridor_high = 3.0;
  SensorEvidenceConfig evidence;
  PlaneFitOptions plane_fit;
};

// Pillar projection of a corridor-segmented voxel map onto the grid. The
// voxel grid must share the cell edge and xy origin with the target spec so
// pillars align with cells. Voxel evidences in one pillar are multiplied in
// ascending z order, which keeps the result bit-stable under any scan
// insertion order.
BeliefGrid project_map(const EvidentialVoxelMap& corridor,
                       const GridSpec2D& spec,
                       const SensorEvidenceConfig& evidence);

struct TargetGridResult {
  BeliefGrid grid;
  PlaneParams plane;
  std::size_t scans_used = 0;
  AccumulateStats accumulate;
};

// Full target pipeline: accumulate every scan within the time window around
// the center scan, fit the ground plane on the accumulated registered points,
// cut the driving corridor and project pillars. Scans are processed in
// timestamp order regardless of their order in the sequence.
TargetGridResult build_target_grid(const ScanSequence& seq,
                                   const std::string& center_scan_id,
                                   const GridSpec2D& spec,
                                   const TargetGridParams& params = {});

// Nearest-neighbor resample of a rotated, offset crop. The crop window is
// centered at the source grid center plus offset and rotated by rotation;
// every sample must fall inside the source extent.
BeliefGrid augment_crop(const BeliefGrid& grid, double rotation,
                        const Eigen::Vector2d& offset, std::int32_t out_size);
MultiLayerGridMap augment_crop(const MultiLayerGridMap& grid, double rotation,
                               const Eigen::Vector2d& offset,
                               std::int32_t out_size);

}  // namespace evigrid
