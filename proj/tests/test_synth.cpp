#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "evigrid/synth.hpp"

using namespace evigrid;
using namespace evigrid::synth;

namespace {

SceneSpec static_scene() {
  SceneSpec scene;
  scene.trajectory = {{0.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(0, 0, 1.5))},
                      {10.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                     Eigen::Vector3d(0, 0, 1.5))}};
  scene.sensor.azimuth_count = 90;
  scene.sensor.elevation_count = 8;
  scene.sensor.elevation_min = -1.2;
  scene.sensor.elevation_max = -0.1;
  scene.sensor.max_range = 40.0;
  return scene;
}

}  // namespace

TEST_CASE("ground-only fan hits only ground") {
  SceneSpec scene = static_scene();
  const LabeledScan scan = simulate_scan(scene, 0.0);
  REQUIRE(!scan.cloud.empty());
  REQUIRE(scan.labels.size() == scan.cloud.size());
  for (std::size_t i = 0; i < scan.cloud.size(); ++i) {
    CHECK(scan.labels[i] == kGroundLabel);
    // Sensor frame: ground sits 1.5 m below the origin.
    CHECK(std::abs(scan.cloud.points[i].z + 1.5) < 1e-9);
  }
}

TEST_CASE("noisy ground stays within three sigma") {
  SceneSpec scene = static_scene();
  scene.sensor.noise_sigma = 0.02;
  scene.sensor.seed = 9;
  const LabeledScan scan = simulate_scan(scene, 0.0);
  std::size_t outliers = 0;
  for (const Point3& p : scan.cloud.points) {
    // Range noise shifts the hit along the ray; the vertical error is the
    // noise times the ray's z component, bounded by the noise itself.
    if (std::abs(p.z + 1.5) > 3.0 * 0.02) ++outliers;
  }
  CHECK(outliers < scan.cloud.size() / 100);
}

TEST_CASE("box face is hit at the analytic distance") {
  SceneSpec scene = static_scene();
  scene.sensor.elevation_min = -0.05;
  scene.sensor.elevation_max = 0.0;
  scene.sensor.azimuth_count = 720;
  scene.boxes.push_back(
      {{10.0, 0.0, 1.0}, {2.0, 2.0, 2.0}, 0.8, Eigen::Vector3d::Zero()});

  const LabeledScan scan = simulate_scan(scene, 0.0);
  bool saw_box = false;
  for (std::size_t i = 0; i < scan.cloud.size(); ++i) {
    if (scan.labels[i] != 0) continue;
    saw_box = true;
    CHECK(scan.cloud.points[i].x ==
          doctest::Approx(9.0).epsilon(1e-9));  // front face at x = 10 - 1
    CHECK(scan.cloud.points[i].intensity == 0.8);
  }
  CHECK(saw_box);
}

TEST_CASE("zero-noise scans are bit identical") {
  SceneSpec scene = static_scene();
  scene.boxes.push_back({{5.0, 1.0, 0.5}, {1.0, 1.0, 1.0}, 0.6, Eigen::Vector3d::Zero()});
  const LabeledScan a = simulate_scan(scene, 0.25);
  const LabeledScan b = simulate_scan(scene, 0.25);
  REQUIRE(a.cloud.size() == b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.points[i].x == b.cloud.points[i].x);
    CHECK(a.cloud.points[i].y == b.cloud.points[i].y);
    CHECK(a.cloud.points[i].z == b.cloud.points[i].z);
  }
}

TEST_CASE("noisy scans are a pure function of scene and time") {
  SceneSpec scene = static_scene();
  scene.sensor.noise_sigma = 0.05;
  scene.sensor.seed = 77;
  const LabeledScan a = simulate_scan(scene, 1.0);
  const LabeledScan b = simulate_scan(scene, 1.0);
  const LabeledScan c = simulate_scan(scene, 2.0);
  REQUIRE(a.cloud.size() == b.cloud.size());
  bool any_difference_to_c = a.cloud.size() != c.cloud.size();
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.points[i].z == b.cloud.points[i].z);
    if (!any_difference_to_c && std::abs(a.cloud.points[i].z - c.cloud.points[i].z) > 0.0) {
      any_difference_to_c = true;
    }
  }
  CHECK(any_difference_to_c);  // independent noise streams per scan time
}

TEST_CASE("zero-noise points lie exactly on a primitive") {
  SceneSpec scene = static_scene();
  scene.boxes.push_back({{6.0, -1.0, 0.75}, {1.5, 1.5, 1.5}, 0.7, Eigen::Vector3d::Zero()});
  scene.cylinders.push_back({{4.0, 3.0}, 0.4, 0.0, 2.0, 0.5, Eigen::Vector2d::Zero()});

  const LabeledScan scan = simulate_scan(scene, 0.0);
  const int box_count = 1;
  for (std::size_t i = 0; i < scan.cloud.size(); ++i) {
    const Eigen::Vector3d world =
        scan.cloud.points[i].position() + Eigen::Vector3d(0, 0, 1.5);
    if (scan.labels[i] == kGroundLabel) {
      CHECK(std::abs(world.z()) < 1e-9);
    } else if (scan.labels[i] < box_count) {
      const Eigen::Vector3d rel =
          (world - scene.boxes[0].center).cwiseAbs() -
          0.5 * scene.boxes[0].size;
      CHECK(std::abs(rel.maxCoeff()) < 1e-9);  // on some face
    } else {
      const Eigen::Vector2d rel(world.x() - 4.0, world.y() - 3.0);
      CHECK(std::abs(rel.norm() - 0.4) < 1e-9);
    }
  }
}

TEST_CASE("moving boxes displace over the sequence") {
  SceneSpec scene = static_scene();
  scene.boxes.push_back(
      {{8.0, 6.0, 0.75}, {1.5, 1.5, 1.5}, 0.9, {0.0, -2.0, 0.0}});
  const SimulatedSequence sim = simulate_sequence(scene, 1.0, 4.0);
  REQUIRE(sim.sequence.scans.size() == 5);
  REQUIRE(sim.labels.size() == 5);

  // Track the mean y of box-labeled points per scan; velocity -2 m/s.
  std::vector<double> mean_y;
  for (std::size_t s = 0; s < 5; ++s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < sim.labels[s].size(); ++i) {
      if (sim.labels[s][i] == 0) {
        sum += sim.sequence.scans[s].points[i].y;
        ++n;
      }
    }
    REQUIRE(n > 0);
    mean_y.push_back(sum / n);
  }
  for (std::size_t s = 1; s < 5; ++s) {
    CHECK(mean_y[s] < mean_y[s - 1] - 1.0);
  }
}

TEST_CASE("straight drive produces unit pose deltas") {
  SceneSpec scene = static_scene();
  scene.trajectory = {{0.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(0, 0, 1.5))},
                      {10.0, PoseSE3(Eigen::Quaterniond::Identity(),
                                     Eigen::Vector3d(10, 0, 1.5))}};
  const SimulatedSequence sim = simulate_sequence(scene, 1.0, 5.0);
  REQUIRE(sim.sequence.scans.size() == 6);
  for (std::size_t i = 1; i < sim.ground_truth.size(); ++i) {
    const Eigen::Vector3d delta = sim.ground_truth[i].translation -
                                  sim.ground_truth[i - 1].translation;
    CHECK((delta - Eigen::Vector3d(1, 0, 0)).norm() < 1e-9);
  }
  CHECK(sim.sequence.scans[3].timestamp == doctest::Approx(3.0));
  CHECK(sim.sequence.scans[0].scan_id != sim.sequence.scans[1].scan_id);
}

TEST_CASE("static sensor repeats identical poses") {
  const SceneSpec scene = static_scene();
  const SimulatedSequence sim = simulate_sequence(scene, 1.0, 4.0);
  for (const PoseSE3& p : sim.ground_truth) {
    CHECK((p.translation - Eigen::Vector3d(0, 0, 1.5)).norm() < 1e-12);
  }
}

TEST_CASE("trajectory lookup fails outside the span") {
  const SceneSpec scene = static_scene();
  CHECK_THROWS_AS(pose_at(scene, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(pose_at(scene, 11.0), std::invalid_argument);
}

TEST_CASE("scene json round trip") {
  SceneSpec scene = static_scene();
  scene.boxes.push_back({{1.0, 2.0, 3.0}, {0.5, 0.6, 0.7}, 0.4, {0.1, 0.0, 0.0}});
  scene.cylinders.push_back({{-2.0, 4.0}, 0.3, 0.1, 1.9, 0.25, {0.0, 0.2}});
  scene.sensor.noise_sigma = 0.01;
  scene.sensor.seed = 5;

  const SceneSpec loaded = scene_from_json(scene_to_json(scene));
  CHECK(loaded.boxes.size() == 1);
  CHECK(loaded.cylinders.size() == 1);
  CHECK(loaded.boxes[0].center.x() == doctest::Approx(1.0));
  CHECK(loaded.cylinders[0].velocity.y() == doctest::Approx(0.2));
  CHECK(loaded.sensor.noise_sigma == doctest::Approx(0.01));
  CHECK(loaded.sensor.seed == 5);
  CHECK(loaded.trajectory.size() == scene.trajectory.size());

  const LabeledScan a = simulate_scan(scene, 0.5);
  const LabeledScan b = simulate_scan(loaded, 0.5);
  REQUIRE(a.cloud.size() == b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.points[i].x == doctest::Approx(b.cloud.points[i].x).epsilon(1e-12));
  }
}
