#include "evigrid/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "evigrid/raycast.hpp"

namespace evigrid {

GridSpec2D GridSpec2D::centered(const Eigen::Vector2d& center, double extent,
                                double cell_edge) {
  GridSpec2D spec;
  spec.cell_edge = cell_edge;
  spec.width = static_cast<std::int32_t>(std::lround(extent / cell_edge));
  spec.height = spec.width;
  spec.origin = center - 0.5 * cell_edge * Eigen::Vector2d(spec.width, spec.height);
  return spec;
}

bool GridSpec2D::same_shape(const GridSpec2D& o) const {
  return width == o.width && height == o.height && cell_edge == o.cell_edge &&
         origin == o.origin;
}

MultiLayerGridMap::MultiLayerGridMap(const GridSpec2D& spec)
    : detections_ground(spec.cell_count(), 0),
      detections_non_ground(spec.cell_count(), 0),
      transmissions_ground(spec.cell_count(), 0),
      transmissions_non_ground(spec.cell_count(), 0),
      intensity_ground(spec.cell_count(), 0.0),
      intensity_non_ground(spec.cell_count(), 0.0),
      spec_(spec) {}

namespace {

void rasterize_subset(const PointCloud& subset, const Eigen::Vector2d& origin,
                      const GridSpec2D& spec,
                      std::vector<std::uint32_t>& detections,
                      std::vector<std::uint32_t>& transmissions,
                      std::vector<double>& intensity_sum) {
  const CellGridGeometry geom = spec.cell_geometry();
  for (const Point3& p : subset.points) {
    const Eigen::Vector2d end(p.x, p.y);
    const CellIndex hit = geom.cell_of(end);
    if (end == origin) {
      if (spec.contains(hit)) {
        ++detections[spec.flat(hit)];
        intensity_sum[spec.flat(hit)] += p.intensity;
      }
      continue;
    }
    for_each_cell_on_segment(origin, end, geom, [&](const CellIndex& c) {
      if (!spec.contains(c)) return;
      if (c == hit) {
        ++detections[spec.flat(c)];
        intensity_sum[spec.flat(c)] += p.intensity;
      } else {
        ++transmissions[spec.flat(c)];
      }
    });
  }
}

void finalize_intensity_mean(const std::vector<std::uint32_t>& detections,
                             std::vector<double>& intensity) {
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    intensity[i] = detections[i] > 0
                       ? intensity[i] / static_cast<double>(detections[i])
                       : 0.0;
  }
}

}  // namespace

MultiLayerGridMap build_input_grid(const PointCloud& scan,
                                   const PlaneParams& plane,
                                   const GridSpec2D& spec,
                                   const InputGridParams& params) {
  if (scan.empty()) {
    throw std::invalid_argument("build_input_grid: empty scan");
  }
  MultiLayerGridMap map(spec);
  const GroundSegmentation seg = segment_points(
      scan, plane, params.ground_band, params.multipath_cutoff);
  const Eigen::Vector2d origin(scan.sensor_origin.x, scan.sensor_origin.y);

  rasterize_subset(seg.ground, origin, spec, map.detections_ground,
                   map.transmissions_ground, map.intensity_ground);
  rasterize_subset(seg.non_ground, origin, spec, map.detections_non_ground,
                   map.transmissions_non_ground, map.intensity_non_ground);
  finalize_intensity_mean(map.detections_ground, map.intensity_ground);
  finalize_intensity_mean(map.detections_non_ground, map.intensity_non_ground);
  return map;
}

BeliefGrid project_map(const EvidentialVoxelMap& corridor,
                       const GridSpec2D& spec,
                       const SensorEvidenceConfig& evidence) {
  const VoxelGridGeometry& vg = corridor.geometry();
  if (vg.edge != spec.cell_edge || vg.origin.x() != spec.origin.x() ||
      vg.origin.y() != spec.origin.y()) {
    throw std::invalid_argument(
        "project_map: voxel grid is not aligned with the cell grid");
  }

  struct Entry {
    CellIndex cell;
    std::int32_t z;
    VoxelCounts counts;
  };
  std::vector<Entry> entries;
  entries.reserve(corridor.size());
  for (const auto& [index, counts] : corridor.voxels()) {
    const CellIndex cell{index.x, index.y};
    if (spec.contains(cell)) entries.push_back({cell, index.z, counts});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.cell.y != b.cell.y) return a.cell.y < b.cell.y;
    if (a.cell.x != b.cell.x) return a.cell.x < b.cell.x;
    return a.z < b.z;
  });

  BeliefGrid grid(spec);
  std::size_t i = 0;
  std::vector<EvidenceMass> pillar;
  while (i < entries.size()) {
    const CellIndex cell = entries[i].cell;
    pillar.clear();
    while (i < entries.size() && entries[i].cell == cell) {
      pillar.push_back(combine_counts(entries[i].counts, evidence));
      ++i;
    }
    const PillarBelief belief = project_pillar(pillar);
    grid.at(cell) = {belief.occupied, belief.free};
  }
  return grid;
}

TargetGridResult build_target_grid(const ScanSequence& seq,
                                   const std::string& center_scan_id,
                                   const GridSpec2D& spec,
                                   const TargetGridParams& params) {
  if (!seq.has_poses()) {
    throw std::invalid_argument("build_target_grid: sequence has no poses");
  }
  seq.validate();

  std::ptrdiff_t center = -1;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    if (seq.scans[i].scan_id == center_scan_id) {
      center = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  if (center < 0) {
    throw std::invalid_argument("build_target_grid: unknown center scan '" +
                                center_scan_id + "'");
  }
  const double t_center = seq.scans[center].timestamp;

  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    if (std::abs(seq.scans[i].timestamp - t_center) <= params.window_seconds) {
      window.push_back(i);
    }
  }
  if (window.empty()) {
    throw std::invalid_argument("build_target_grid: no scans in window");
  }
  // Sequence scans are timestamp-ordered, so `window` already is; processing
  // in this order pins the floating-point path for the plane fit.

  VoxelGridGeometry vg;
  vg.edge = spec.cell_edge;
  vg.origin = Eigen::Vector3d(spec.origin.x(), spec.origin.y(), 0.0);

  TargetGridResult result{BeliefGrid(spec), PlaneParams{}, 0, {}};
  EvidentialVoxelMap map(vg);
  std::vector<Point3> accumulated;
  for (const std::size_t i : window) {
    const AccumulateStats s = accumulate_scan(map, seq.scans[i], seq.poses[i]);
    result.accumulate.rays += s.rays;
    result.accumulate.skipped_zero_length += s.skipped_zero_length;
    const PointCloud registered = transform_cloud(seq.scans[i], seq.poses[i]);
    accumulated.insert(accumulated.end(), registered.points.begin(),
                       registered.points.end());
  }
  result.scans_used = window.size();
  result.plane = fit_plane(accumulated, params.plane_fit);

  const EvidentialVoxelMap corridor = segment_corridor(
      map, result.plane, params.corridor_low, params.corridor_high);
  result.grid = project_map(corridor, spec, params.evidence);
  return result;
}

namespace {

// Maps every output cell to its source cell; throws when a sample leaves the
// source extent.
template <typename CopyCell>
void resample_crop(const GridSpec2D& src, double rotation,
                   const Eigen::Vector2d& offset, const GridSpec2D& dst,
                   CopyCell&& copy) {
  const Eigen::Rotation2Dd rot(rotation);
  const Eigen::Vector2d pivot = src.center() + offset;
  const CellGridGeometry src_geom = src.cell_geometry();
  const CellGridGeometry dst_geom = dst.cell_geometry();
  for (std::int32_t y = 0; y < dst.height; ++y) {
    for (std::int32_t x = 0; x < dst.width; ++x) {
      const Eigen::Vector2d out_center = dst_geom.center_of({x, y});
      const Eigen::Vector2d sample = pivot + rot * (out_center - pivot);
      const CellIndex sc = src_geom.cell_of(sample);
      if (!src.contains(sc)) {
        throw std::invalid_argument(
            "augment_crop: crop window exceeds source extent");
      }
      copy(dst.flat({x, y}), src.flat(sc));
    }
  }
}

GridSpec2D crop_spec(const GridSpec2D& src, const Eigen::Vector2d& offset,
                     std::int32_t out_size) {
  if (out_size <= 0) {
    throw std::invalid_argument("augment_crop: out_size must be positive");
  }
  GridSpec2D dst;
  dst.cell_edge = src.cell_edge;
  dst.width = out_size;
  dst.height = out_size;
  dst.origin = src.center() + offset -
               0.5 * src.cell_edge * Eigen::Vector2d(out_size, out_size);
  return dst;
}

}  // namespace

BeliefGrid augment_crop(const BeliefGrid& grid, double rotation,
                        const Eigen::Vector2d& offset, std::int32_t out_size) {
  const GridSpec2D dst = crop_spec(grid.spec(), offset, out_size);
  BeliefGrid out(dst);
  resample_crop(grid.spec(), rotation, offset, dst,
                [&](std::size_t di, std::size_t si) {
                  out.cells()[di] = grid.cells()[si];
                });
  return out;
}

MultiLayerGridMap augment_crop(const MultiLayerGridMap& grid, double rotation,
                               const Eigen::Vector2d& offset,
                               std::int32_t out_size) {
  const GridSpec2D dst = crop_spec(grid.spec(), offset, out_size);
  MultiLayerGridMap out(dst);
  resample_crop(grid.spec(), rotation, offset, dst,
                [&](std::size_t di, std::size_t si) {
                  out.detections_ground[di] = grid.detections_ground[si];
                  out.detections_non_ground[di] = grid.detections_non_ground[si];
                  out.transmissions_ground[di] = grid.transmissions_ground[si];
                  out.transmissions_non_ground[di] =
                      grid.transmissions_non_ground[si];
                  out.intensity_ground[di] = grid.intensity_ground[si];
                  out.intensity_non_ground[di] = grid.intensity_non_ground[si];
                });
  return out;
}

}  // namespace evigrid
