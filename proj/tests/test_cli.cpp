#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "evigrid/grid_io.hpp"
#include "evigrid/io.hpp"
#include "evigrid/synth.hpp"
#include "test_util.hpp"

using namespace evigrid;
using evigrid::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) {
  return cli::run(std::vector<std::string>(args));
}

std::string demo_scene_json() {
  synth::SceneSpec scene;
  scene.ground_reflectivity = 0.3;
  scene.boxes.push_back({{6.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, 0.8, Eigen::Vector3d::Zero()});
  scene.boxes.push_back({{-5.0, -3.0, 0.75}, {1.5, 1.5, 1.5}, 0.7, Eigen::Vector3d::Zero()});
  scene.boxes.push_back({{1.0, 7.0, 1.0}, {3.0, 1.0, 2.0}, 0.75, Eigen::Vector3d::Zero()});
  scene.boxes.push_back({{-2.0, -8.0, 1.0}, {2.5, 1.0, 2.0}, 0.65, Eigen::Vector3d::Zero()});
  scene.cylinders.push_back({{3.0, -5.0}, 0.3, 0.0, 2.5, 0.5, Eigen::Vector2d::Zero()});
  scene.trajectory = {{0.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(0.0, -1.0, 1.5))},
                      {4.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(0.0, 1.0, 1.5))}};
  scene.sensor.azimuth_count = 180;
  scene.sensor.elevation_count = 12;
  scene.sensor.elevation_min = -0.6;
  scene.sensor.elevation_max = 0.05;
  scene.sensor.max_range = 25.0;
  scene.sensor.noise_sigma = 0.005;
  scene.sensor.seed = 21;
  return synth::scene_to_json(scene);
}

std::string small_config_json() {
  return R"({"map_extent": 32.0, "crop_size": 128})";
}

bool same_bytes(const std::string& a, const std::string& b) {
  return read_text_file(a) == read_text_file(b);
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files_a;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.is_regular_file()) {
      files_a.push_back(fs::relative(entry.path(), a));
    }
  }
  std::sort(files_a.begin(), files_a.end());
  for (const fs::path& rel : files_a) {
    if (!fs::exists(b / rel)) return false;
    if (!same_bytes((a / rel).string(), (b / rel).string())) return false;
  }
  std::size_t count_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b)) {
    if (entry.is_regular_file()) ++count_b;
  }
  return count_b == files_a.size();
}

}  // namespace

TEST_CASE("cli usage errors") {
  CHECK(run({}) != 0);
  CHECK(run({"no-such-command"}) != 0);
  CHECK(run({"synth"}) != 0);                                  // missing args
  CHECK(run({"register", "/nonexistent.json", "-o", "/tmp/x"}) == 1);
}

TEST_CASE("full pipeline runs end to end") {
  TempDir tmp("pipeline");
  write_text_file(demo_scene_json(), tmp.str("scene.json"));
  write_text_file(small_config_json(), tmp.str("config.json"));
  const std::string cfg = tmp.str("config.json");

  REQUIRE(run({"synth", tmp.str("scene.json"), "-o", tmp.str("data"),
               "--rate", "1.0"}) == 0);
  CHECK(fs::exists(tmp.str("data/manifest.json")));
  CHECK(fs::exists(tmp.str("data/gt_poses.txt")));
  CHECK(fs::exists(tmp.str("data/config.json")));

  REQUIRE(run({"register", tmp.str("data/manifest.json"), "-o",
               tmp.str("poses.txt"), "--config", cfg, "--threads", "1"}) == 0);
  CHECK(fs::exists(tmp.str("poses.txt")));
  CHECK(fs::exists(tmp.str("poses.txt.config.json")));

  // Registered poses must stay close to the simulated ground truth.
  const auto estimated = read_pose_file(tmp.str("poses.txt"));
  const auto truth = read_pose_file(tmp.str("data/gt_poses.txt"));
  REQUIRE(estimated.size() == truth.size());
  const PoseSE3 anchor = truth[0].second;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const PoseSE3 rel_truth = compose(inverse(anchor), truth[i].second);
    CHECK(translation_distance(estimated[i].second, rel_truth) < 0.05);
  }

  REQUIRE(run({"ground-fit", tmp.str("data/manifest.json"), "--poses",
               tmp.str("poses.txt"), "-o", tmp.str("plane.json"),
               "--config", cfg}) == 0);
  const PlaneParams plane = read_plane_json(tmp.str("plane.json"));
  CHECK(plane.normal.z() > 0.99);
  // Ground sits 1.5 m below the reference scan, z = -1.5, so d = +1.5.
  CHECK(std::abs(plane.d - 1.5) < 0.05);

  REQUIRE(run({"voxelize", tmp.str("data/manifest.json"), tmp.str("poses.txt"),
               "-o", tmp.str("map.evx"), "--config", cfg}) == 0);
  REQUIRE(run({"project", tmp.str("map.evx"), tmp.str("plane.json"), "-o",
               tmp.str("target"), "--config", cfg}) == 0);
  CHECK(peek_grid_kind(tmp.str("target")) == GridKind::kBelief);

  REQUIRE(run({"input-grid", tmp.str("data/scans/scan_0002.evs1"), "-o",
               tmp.str("input"), "--config", cfg}) == 0);
  CHECK(peek_grid_kind(tmp.str("input")) == GridKind::kMultiLayer);

  REQUIRE(run({"augment", tmp.str("target"), "-o", tmp.str("crop"),
               "--rotation-deg", "90", "--size", "96", "--config", cfg}) == 0);
  const BeliefGrid crop = load_belief_grid(tmp.str("crop"));
  CHECK(crop.spec().width == 96);

  REQUIRE(run({"evaluate", tmp.str("target"), tmp.str("target"), "-o",
               tmp.str("report.json"), "--config", cfg}) == 0);
  const auto report = nlohmann::json::parse(read_text_file(tmp.str("report.json")));
  CHECK(report.at("l1").get<double>() == 0.0);
  CHECK(report.at("l2").get<double>() == 0.0);
  CHECK(report.at("false_occupied").get<double>() == 0.0);
  CHECK(report.at("false_free").get<double>() == 0.0);
  CHECK(report.at("rel_unc").get<double>() == 1.0);
  CHECK(report.contains("config"));

  REQUIRE(run({"evaluate", tmp.str("missing_dir"), tmp.str("target"), "-o",
               tmp.str("report_weighted.json"), "--config", cfg}) == 1);
  REQUIRE(run({"evaluate", tmp.str("target"), tmp.str("target"), "-o",
               tmp.str("report_weighted.json"), "--certainty-k", "0.9",
               "--asym-k", "0.8", "--asym-sign", "-1", "--config", cfg}) == 0);
  const auto weighted =
      nlohmann::json::parse(read_text_file(tmp.str("report_weighted.json")));
  CHECK(weighted.at("l1_certainty_weighted").get<double>() == 0.0);
  CHECK(weighted.at("l1_asymmetric").get<double>() == 0.0);
  CHECK(weighted.at("config").at("metric_asym_sign").get<int>() == -1);

  REQUIRE(run({"render", tmp.str("target"), "-o", tmp.str("render")}) == 0);
  CHECK(fs::exists(tmp.str("render/bel_occupied.png")));
  CHECK(fs::exists(tmp.str("render/bel_free.png")));
  REQUIRE(run({"render", tmp.str("input"), "-o", tmp.str("det.png"),
               "--layer", "detections_non_ground"}) == 0);
  CHECK(fs::exists(tmp.str("det.png")));
}

TEST_CASE("identical runs produce byte-identical outputs") {
  TempDir tmp("determinism");
  write_text_file(demo_scene_json(), tmp.str("scene.json"));
  write_text_file(small_config_json(), tmp.str("config.json"));
  const std::string cfg = tmp.str("config.json");

  for (const char* round : {"a", "b"}) {
    const std::string base = tmp.str(round);
    REQUIRE(run({"synth", tmp.str("scene.json"), "-o", base + "/data"}) == 0);
    REQUIRE(run({"ground-fit", base + "/data/manifest.json", "--poses",
                 base + "/data/gt_poses.txt", "-o", base + "/plane.json",
                 "--config", cfg}) == 0);
    REQUIRE(run({"voxelize", base + "/data/manifest.json",
                 base + "/data/gt_poses.txt", "-o", base + "/map.evx",
                 "--config", cfg}) == 0);
    REQUIRE(run({"project", base + "/map.evx", base + "/plane.json", "-o",
                 base + "/target", "--config", cfg}) == 0);
    REQUIRE(run({"input-grid", base + "/data/scans/scan_0001.evs1", "-o",
                 base + "/input", "--config", cfg}) == 0);
  }
  CHECK(same_tree(tmp.str("a"), tmp.str("b")));
}

TEST_CASE("scan order in the manifest does not change the target grid") {
  TempDir tmp("order");
  write_text_file(demo_scene_json(), tmp.str("scene.json"));
  write_text_file(small_config_json(), tmp.str("config.json"));
  const std::string cfg = tmp.str("config.json");

  REQUIRE(run({"synth", tmp.str("scene.json"), "-o", tmp.str("data")}) == 0);

  // Second manifest with reversed scan entries.
  auto entries = read_manifest(tmp.str("data/manifest.json"));
  std::reverse(entries.begin(), entries.end());
  write_manifest(entries, tmp.str("data/manifest_reversed.json"));

  for (const char* manifest : {"manifest.json", "manifest_reversed.json"}) {
    const std::string out = tmp.str(std::string("out_") + manifest);
    REQUIRE(run({"ground-fit", tmp.str("data/") + manifest, "--poses",
                 tmp.str("data/gt_poses.txt"), "-o", out + ".plane.json",
                 "--config", cfg}) == 0);
    REQUIRE(run({"voxelize", tmp.str("data/") + manifest,
                 tmp.str("data/gt_poses.txt"), "-o", out + ".evx",
                 "--config", cfg}) == 0);
    REQUIRE(run({"project", out + ".evx", out + ".plane.json", "-o", out,
                 "--config", cfg}) == 0);
  }
  CHECK(same_bytes(tmp.str("out_manifest.json/bel_occupied.pgm"),
                   tmp.str("out_manifest_reversed.json/bel_occupied.pgm")));
  CHECK(same_bytes(tmp.str("out_manifest.json/bel_free.pgm"),
                   tmp.str("out_manifest_reversed.json/bel_free.pgm")));
}
