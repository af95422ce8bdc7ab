#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evigrid/ground.hpp"
#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid {

// Scan file format "EVS1": little-endian, 16-byte header (magic "EVS1",
// u32 point count, f64 timestamp) followed by 4 x f32 per point
// (x, y, z, intensity).
void write_scan_evs1(const PointCloud& cloud, const std::string& path);

struct ScanLoadStats {
  std::size_t clamped_intensities = 0;  // out-of-range values clamped to [0, 1]
};

PointCloud read_scan_evs1(const std::string& path,
                          ScanLoadStats* stats = nullptr);

// Pose file: one text line per scan, `scan_id tx ty tz qx qy qz qw`.
void write_pose_file(const std::vector<std::string>& scan_ids,
                     const std::vector<PoseSE3>& poses,
                     const std::string& path);
std::vector<std::pair<std::string, PoseSE3>> read_pose_file(
    const std::string& path);

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest directory unless absolute
  double timestamp = 0.0;
};

// Sequence manifest: JSON {"scans": [{"id", "path", "timestamp"}]}.
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path);
std::vector<ManifestEntry> read_manifest(const std::string& path);

// Loads every scan of a manifest, sorted by timestamp; attaches poses by
// scan id when a pose file is given.
ScanSequence load_sequence(const std::string& manifest_path,
                           const std::optional<std::string>& pose_path = {},
                           ScanLoadStats* stats = nullptr);

// Plane JSON {"nx", "ny", "nz", "d"}.
void write_plane_json(const PlaneParams& plane, const std::string& path);
PlaneParams read_plane_json(const std::string& path);

// Point labels, one integer per line.
void write_labels(const std::vector<int>& labels, const std::string& path);
std::vector<int> read_labels(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace evigrid
