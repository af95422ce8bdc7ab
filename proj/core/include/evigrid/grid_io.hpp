#pragma once

#include <string>
#include <vector>

#include "evigrid/grid_map.hpp"
#include "evigrid/voxel_map.hpp"

namespace evigrid {

// Voxel map file "EVX1": little-endian, header (magic "EVX1", f64 voxel
// edge, 3 x f64 origin, u64 record count), then per voxel
// (i32 ix, i32 iy, i32 iz, u32 reflections, u32 transmissions). Records are
// sorted by (ix, iy, iz) so identical maps serialize identically.
void save_voxel_map(const EvidentialVoxelMap& map, const std::string& path);
EvidentialVoxelMap load_voxel_map(const std::string& path);

// Grid directory layout: one 16-bit PGM per layer plus a `grid.json` sidecar
// holding origin, cell edge, shape, per-layer scale factors and the echoed
// pipeline configuration. Belief channels are stored as value / 65535.
void save_belief_grid(const BeliefGrid& grid, const std::string& dir,
                      const std::string& config_json = "{}");
BeliefGrid load_belief_grid(const std::string& dir);

void save_multilayer_grid(const MultiLayerGridMap& grid, const std::string& dir,
                          const std::string& config_json = "{}");
MultiLayerGridMap load_multilayer_grid(const std::string& dir);

enum class GridKind { kBelief, kMultiLayer };
GridKind peek_grid_kind(const std::string& dir);
std::vector<std::string> grid_layer_names(const std::string& dir);

// Layer values normalized to [0, 1] for rendering (counts divided by their
// maximum, beliefs and intensities passed through).
std::vector<double> normalized_layer(const BeliefGrid& grid,
                                     const std::string& layer);
std::vector<double> normalized_layer(const MultiLayerGridMap& grid,
                                     const std::string& layer);

// 8-bit RGB PNG, low values white, high values red. Values are clamped to
// [0, 1]; row 0 of the image is the grid's highest y row.
void write_png_heatmap(const std::vector<double>& values, std::int32_t width,
                       std::int32_t height, const std::string& path);

// 16-bit binary PGM (P5, maxval 65535), same row order as the PNG heatmaps.
void write_pgm16(const std::vector<std::uint16_t>& samples, std::int32_t width,
                 std::int32_t height, const std::string& path);
std::vector<std::uint16_t> read_pgm16(const std::string& path,
                                      std::int32_t* width,
                                      std::int32_t* height);

}  // namespace evigrid
