#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "evigrid/grid_io.hpp"
#include "evigrid/io.hpp"
#include "test_util.hpp"

using namespace evigrid;
using evigrid::testing::TempDir;

TEST_CASE("evs1 round trip") {
  TempDir tmp("evs1");
  PointCloud cloud;
  cloud.scan_id = "scan_a";
  cloud.timestamp = 12.5;
  // float32-representable values survive the round trip exactly
  cloud.points = {Point3(1.5, -2.25, 0.125, 0.5),
                  Point3(-0.5, 3.75, -1.0, 1.0),
                  Point3(0.0, 0.0, 7.5, 0.0)};
  const std::string path = tmp.str("scan_a.evs1");
  write_scan_evs1(cloud, path);

  const PointCloud loaded = read_scan_evs1(path);
  CHECK(loaded.timestamp == 12.5);
  CHECK(loaded.scan_id == "scan_a");
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded.points[i].x == cloud.points[i].x);
    CHECK(loaded.points[i].y == cloud.points[i].y);
    CHECK(loaded.points[i].z == cloud.points[i].z);
    CHECK(loaded.points[i].intensity == cloud.points[i].intensity);
  }

  // 16-byte header then 16 bytes per point.
  CHECK(std::filesystem::file_size(path) == 16 + 3 * 16);
}

TEST_CASE("evs1 clamps out-of-range intensities") {
  TempDir tmp("evs1_clamp");
  const std::string path = tmp.str("bad.evs1");
  {
    std::ofstream out(path, std::ios::binary);
    out.write("EVS1", 4);
    const std::uint32_t count = 1;
    const double ts = 0.0;
    out.write(reinterpret_cast<const char*>(&count), 4);
    out.write(reinterpret_cast<const char*>(&ts), 8);
    const float values[4] = {1.0f, 2.0f, 3.0f, 1.5f};  // intensity 1.5
    out.write(reinterpret_cast<const char*>(values), 16);
  }
  ScanLoadStats stats;
  const PointCloud loaded = read_scan_evs1(path, &stats);
  CHECK(stats.clamped_intensities == 1);
  CHECK(loaded.points[0].intensity == 1.0);
}

TEST_CASE("evs1 rejects foreign files") {
  TempDir tmp("evs1_bad");
  const std::string path = tmp.str("not_a_scan.bin");
  write_text_file("hello world, definitely not a scan", path);
  CHECK_THROWS_AS(read_scan_evs1(path), std::runtime_error);
  CHECK_THROWS_AS(read_scan_evs1(tmp.str("missing.evs1")), std::runtime_error);
}

TEST_CASE("pose file round trip is exact") {
  TempDir tmp("poses");
  std::mt19937 rng(3);
  std::vector<std::string> ids;
  std::vector<PoseSE3> poses;
  for (int i = 0; i < 10; ++i) {
    ids.push_back("scan_" + std::to_string(i));
    poses.push_back(evigrid::testing::random_pose(rng));
  }
  const std::string path = tmp.str("poses.txt");
  write_pose_file(ids, poses, path);

  const auto loaded = read_pose_file(path);
  REQUIRE(loaded.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(loaded[i].first == ids[i]);
    CHECK(loaded[i].second.translation == poses[i].translation);
    // %.17g keeps doubles exactly; the quaternion may renormalize through
    // the constructor but coefficients match bit for bit.
    CHECK(loaded[i].second.rotation.coeffs() == poses[i].rotation.coeffs());
  }
}

TEST_CASE("manifest round trip and sequence loading") {
  TempDir tmp("manifest");
  std::mt19937 rng(5);

  std::vector<ManifestEntry> entries;
  std::vector<std::string> ids;
  std::vector<PoseSE3> poses;
  for (int i = 0; i < 3; ++i) {
    PointCloud cloud;
    cloud.scan_id = "s" + std::to_string(i);
    cloud.timestamp = i;
    cloud.points = evigrid::testing::random_points(rng, 20, 4.0);
    write_scan_evs1(cloud, tmp.str(cloud.scan_id + ".evs1"));
    entries.push_back({cloud.scan_id, cloud.scan_id + ".evs1",
                       cloud.timestamp});
    ids.push_back(cloud.scan_id);
    poses.push_back(evigrid::testing::random_pose(rng));
  }
  // Shuffled manifest order: loading sorts by timestamp.
  std::swap(entries[0], entries[2]);
  write_manifest(entries, tmp.str("manifest.json"));
  write_pose_file(ids, poses, tmp.str("poses.txt"));

  const ScanSequence seq =
      load_sequence(tmp.str("manifest.json"), tmp.str("poses.txt"));
  REQUIRE(seq.scans.size() == 3);
  CHECK(seq.scans[0].scan_id == "s0");
  CHECK(seq.scans[2].scan_id == "s2");
  REQUIRE(seq.has_poses());
  CHECK(seq.poses[1].translation == poses[1].translation);

  CHECK_THROWS_AS(load_sequence(tmp.str("nope.json")), std::runtime_error);
}

TEST_CASE("plane json round trip") {
  TempDir tmp("plane");
  PlaneParams plane;
  plane.normal = Eigen::Vector3d(0.1, 0.2, 0.97).normalized();
  plane.d = -1.25;
  write_plane_json(plane, tmp.str("plane.json"));
  const PlaneParams loaded = read_plane_json(tmp.str("plane.json"));
  CHECK((loaded.normal - plane.normal).norm() < 1e-15);
  CHECK(loaded.d == plane.d);
}

TEST_CASE("labels round trip") {
  TempDir tmp("labels");
  const std::vector<int> labels = {-1, 0, 3, -1, 7};
  write_labels(labels, tmp.str("a.labels"));
  CHECK(read_labels(tmp.str("a.labels")) == labels);
}

TEST_CASE("voxel map file round trip") {
  TempDir tmp("voxmap");
  VoxelGridGeometry geom;
  geom.origin = {-50.0, -50.0, 0.0};
  geom.edge = 0.125;
  EvidentialVoxelMap map(geom);
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(-200, 200);
  std::uniform_int_distribution<std::uint32_t> count(0, 40);
  for (int i = 0; i < 500; ++i) {
    map.insert({idx(rng), idx(rng), idx(rng)}, {count(rng), count(rng)});
  }
  save_voxel_map(map, tmp.str("map.evx"));
  const EvidentialVoxelMap loaded = load_voxel_map(tmp.str("map.evx"));
  CHECK(loaded.geometry().edge == geom.edge);
  CHECK(loaded.geometry().origin == geom.origin);
  REQUIRE(loaded.size() == map.size());
  for (const auto& [index, counts] : map.voxels()) {
    CHECK(loaded.counts_at(index).reflections == counts.reflections);
    CHECK(loaded.counts_at(index).transmissions == counts.transmissions);
  }

  // Serialization is canonical: a permuted insertion order writes the same
  // bytes.
  EvidentialVoxelMap again(geom);
  std::vector<std::pair<VoxelIndex, VoxelCounts>> items(map.voxels().begin(),
                                                        map.voxels().end());
  std::shuffle(items.begin(), items.end(), rng);
  for (const auto& [index, counts] : items) again.insert(index, counts);
  save_voxel_map(again, tmp.str("map2.evx"));
  CHECK(read_text_file(tmp.str("map.evx")) == read_text_file(tmp.str("map2.evx")));
}

TEST_CASE("pgm16 round trip") {
  TempDir tmp("pgm");
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> v(0, 65535);
  const std::int32_t w = 17, h = 9;
  std::vector<std::uint16_t> samples(w * h);
  for (auto& s : samples) s = static_cast<std::uint16_t>(v(rng));
  write_pgm16(samples, w, h, tmp.str("img.pgm"));
  std::int32_t rw = 0, rh = 0;
  const auto loaded = read_pgm16(tmp.str("img.pgm"), &rw, &rh);
  CHECK(rw == w);
  CHECK(rh == h);
  CHECK(loaded == samples);
}

TEST_CASE("belief grid directory round trip") {
  TempDir tmp("belief");
  GridSpec2D spec;
  spec.origin = {-4.0, -4.0};
  spec.cell_edge = 0.25;
  spec.width = 32;
  spec.height = 32;
  BeliefGrid grid(spec);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (BeliefCell& c : grid.cells()) {
    const double occupied = u(rng);
    c = {occupied, u(rng) * (1.0 - occupied)};
  }
  save_belief_grid(grid, tmp.str("grid"), R"({"note": 1})");
  CHECK(peek_grid_kind(tmp.str("grid")) == GridKind::kBelief);

  const BeliefGrid loaded = load_belief_grid(tmp.str("grid"));
  CHECK(loaded.spec().same_shape(grid.spec()));
  for (std::size_t i = 0; i < grid.cells().size(); ++i) {
    CHECK(std::abs(loaded.cells()[i].occupied - grid.cells()[i].occupied) <=
          0.5 / 65535.0 + 1e-12);
    CHECK(std::abs(loaded.cells()[i].free - grid.cells()[i].free) <=
          0.5 / 65535.0 + 1e-12);
  }
  CHECK(grid_layer_names(tmp.str("grid")) ==
        std::vector<std::string>{"bel_occupied", "bel_free"});
}

TEST_CASE("multilayer grid directory round trip") {
  TempDir tmp("multilayer");
  GridSpec2D spec;
  spec.origin = {0.0, 0.0};
  spec.cell_edge = 0.125;
  spec.width = 16;
  spec.height = 24;
  MultiLayerGridMap grid(spec);
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::uint32_t> c(0, 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    grid.detections_ground[i] = c(rng);
    grid.detections_non_ground[i] = c(rng);
    grid.transmissions_ground[i] = c(rng);
    grid.transmissions_non_ground[i] = c(rng);
    grid.intensity_ground[i] = std::round(u(rng) * 65535.0) / 65535.0;
    grid.intensity_non_ground[i] = std::round(u(rng) * 65535.0) / 65535.0;
  }
  save_multilayer_grid(grid, tmp.str("grid"));
  CHECK(peek_grid_kind(tmp.str("grid")) == GridKind::kMultiLayer);

  const MultiLayerGridMap loaded = load_multilayer_grid(tmp.str("grid"));
  CHECK(loaded.spec().same_shape(spec));
  CHECK(loaded.detections_ground == grid.detections_ground);
  CHECK(loaded.transmissions_non_ground == grid.transmissions_non_ground);
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    CHECK(std::abs(loaded.intensity_ground[i] - grid.intensity_ground[i]) <
          1e-12);
  }
}

TEST_CASE("png heatmap carries the png signature") {
  TempDir tmp("png");
  std::vector<double> values(64, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = i / 63.0;
  write_png_heatmap(values, 8, 8, tmp.str("img.png"));
  const std::string data = read_text_file(tmp.str("img.png"));
  REQUIRE(data.size() > 8);
  CHECK(static_cast<unsigned char>(data[0]) == 0x89);
  CHECK(data.substr(1, 3) == "PNG");
  CHECK(data.find("IHDR") != std::string::npos);
  CHECK(data.find("IEND") != std::string::npos);
}
