#include "evigrid/synth.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Geometry>

#include <nlohmann/json.hpp>

namespace evigrid::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// One standard-normal draw per ray, platform-stable Box-Muller over a
// splitmix64 stream.
double ray_normal(std::uint64_t seed, double t, std::uint64_t ray_index) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(std::bit_cast<std::uint64_t>(t)));
  s = splitmix64(s ^ ray_index);
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(a);
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

struct Hit {
  double range = std::numeric_limits<double>::infinity();
  double reflectivity = 0.0;
  int label = kGroundLabel;
};

void intersect_plane(const PlaneParams& plane, double reflectivity,
                     const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                     Hit* best) {
  const double denom = plane.normal.dot(d);
  if (std::abs(denom) < 1e-12) return;
  const double t = -(plane.normal.dot(o) + plane.d) / denom;
  if (t > 1e-6 && t < best->range) {
    *best = {t, reflectivity, kGroundLabel};
  }
}

void intersect_box(const BoxSpec& box, double time, int label,
                   const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                   Hit* best) {
  const Eigen::Vector3d c = box.center + box.velocity * time;
  const Eigen::Vector3d lo = c - 0.5 * box.size;
  const Eigen::Vector3d hi = c + 0.5 * box.size;
  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < lo[a] || o[a] > hi[a]) return;
      continue;
    }
    double t0 = (lo[a] - o[a]) / d[a];
    double t1 = (hi[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return;
  }
  if (t_enter > 1e-6 && t_enter < best->range) {
    *best = {t_enter, box.reflectivity, label};
  }
}

void intersect_cylinder(const CylinderSpec& cyl, double time, int label,
                        const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                        Hit* best) {
  const Eigen::Vector2d c = cyl.center + cyl.velocity * time;
  const Eigen::Vector2d oc(o.x() - c.x(), o.y() - c.y());
  const Eigen::Vector2d dd(d.x(), d.y());
  const double a = dd.squaredNorm();
  if (a < 1e-15) return;  // vertical ray, side surface never hit
  const double b = 2.0 * oc.dot(dd);
  const double q = oc.squaredNorm() - cyl.radius * cyl.radius;
  const double disc = b * b - 4.0 * a * q;
  if (disc < 0.0) return;
  const double sqrt_disc = std::sqrt(disc);
  for (const double t : {(-b - sqrt_disc) / (2.0 * a),
                         (-b + sqrt_disc) / (2.0 * a)}) {
    if (t <= 1e-6 || t >= best->range) continue;
    const double z = o.z() + t * d.z();
    if (z >= cyl.z_min && z <= cyl.z_max) {
      *best = {t, cyl.reflectivity, label};
      return;  // the nearer root comes first
    }
  }
}

}  // namespace

PoseSE3 pose_at(const SceneSpec& scene, double t) {
  const auto& traj = scene.trajectory;
  if (traj.empty()) {
    throw std::invalid_argument("pose_at: empty trajectory");
  }
  const double eps = 1e-9;
  if (t < traj.front().t - eps || t > traj.back().t + eps) {
    throw std::invalid_argument("pose_at: time outside trajectory span");
  }
  if (traj.size() == 1 || t <= traj.front().t) return traj.front().pose;
  if (t >= traj.back().t) return traj.back().pose;

  std::size_t hi = 1;
  while (traj[hi].t < t) ++hi;
  const TrajectoryKnot& k0 = traj[hi - 1];
  const TrajectoryKnot& k1 = traj[hi];
  const double u = (t - k0.t) / (k1.t - k0.t);
  // Delta forms are exact for coincident knots, so a static trajectory
  // yields bit-identical poses at every sample time.
  const Eigen::Quaterniond q =
      k0.pose.rotation.coeffs() == k1.pose.rotation.coeffs()
          ? k0.pose.rotation
          : k0.pose.rotation.slerp(u, k1.pose.rotation);
  const Eigen::Vector3d p =
      k0.pose.translation + u * (k1.pose.translation - k0.pose.translation);
  return {q, p};
}

LabeledScan simulate_scan(const SceneSpec& scene, double t) {
  const PoseSE3 pose = pose_at(scene, t);
  const SensorModel& s = scene.sensor;
  if (s.azimuth_count <= 0 || s.elevation_count <= 0) {
    throw std::invalid_argument("simulate_scan: empty ray fan");
  }

  LabeledScan out;
  out.cloud.timestamp = t;
  out.cloud.scan_id = "scan";
  out.cloud.sensor_origin = Point3(0.0, 0.0, 0.0);
  out.cloud.points.reserve(
      static_cast<std::size_t>(s.azimuth_count) * s.elevation_count);

  const Eigen::Vector3d origin = pose.translation;
  const int box_count = static_cast<int>(scene.boxes.size());

  for (int ei = 0; ei < s.elevation_count; ++ei) {
    const double elev =
        s.elevation_count == 1
            ? 0.5 * (s.elevation_min + s.elevation_max)
            : s.elevation_min + (s.elevation_max - s.elevation_min) * ei /
                                    (s.elevation_count - 1);
    for (int ai = 0; ai < s.azimuth_count; ++ai) {
      const double az = s.azimuth_start + s.azimuth_span * ai / s.azimuth_count;
      const Eigen::Vector3d dir_sensor(std::cos(elev) * std::cos(az),
                                       std::cos(elev) * std::sin(az),
                                       std::sin(elev));
      const Eigen::Vector3d dir = pose.rotation * dir_sensor;

      Hit best;
      intersect_plane(scene.ground, scene.ground_reflectivity, origin, dir,
                      &best);
      for (int b = 0; b < box_count; ++b) {
        intersect_box(scene.boxes[b], t, b, origin, dir, &best);
      }
      for (std::size_t c = 0; c < scene.cylinders.size(); ++c) {
        intersect_cylinder(scene.cylinders[c], t, box_count + static_cast<int>(c),
                           origin, dir, &best);
      }
      if (best.range > s.max_range) continue;

      double range = best.range;
      if (s.noise_sigma > 0.0) {
        const std::uint64_t ray_index =
            static_cast<std::uint64_t>(ei) * s.azimuth_count + ai;
        range += s.noise_sigma * ray_normal(s.seed, t, ray_index);
        range = std::max(range, 1e-6);
      }
      const Eigen::Vector3d p = range * dir_sensor;
      out.cloud.points.emplace_back(p.x(), p.y(), p.z(), best.reflectivity);
      out.labels.push_back(best.label);
    }
  }
  return out;
}

SimulatedSequence simulate_sequence(const SceneSpec& scene, double rate_hz,
                                    double duration_s) {
  if (!(rate_hz > 0.0) || !(duration_s >= 0.0)) {
    throw std::invalid_argument("simulate_sequence: bad rate or duration");
  }
  if (scene.trajectory.empty()) {
    throw std::invalid_argument("simulate_sequence: empty trajectory");
  }
  SimulatedSequence out;
  const double t0 = scene.trajectory.front().t;
  const auto count =
      static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) / rate_hz;
    LabeledScan scan = simulate_scan(scene, t);
    char id[32];
    std::snprintf(id, sizeof(id), "scan_%04zu", k);
    scan.cloud.scan_id = id;
    out.ground_truth.push_back(pose_at(scene, t));
    out.labels.push_back(std::move(scan.labels));
    out.sequence.scans.push_back(std::move(scan.cloud));
  }
  return out;
}

namespace {

using nlohmann::json;

Eigen::Vector3d vec3(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Eigen::Vector2d vec2(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

constexpr double kDegToRad = kPi / 180.0;

}  // namespace

SceneSpec scene_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  SceneSpec scene;

  if (j.contains("ground")) {
    const json& g = j.at("ground");
    scene.ground.normal = g.contains("normal") ? vec3(g.at("normal")).normalized()
                                               : Eigen::Vector3d(0, 0, 1);
    scene.ground.d = g.value("d", 0.0);
    scene.ground_reflectivity = g.value("reflectivity", 0.3);
  }
  for (const json& b : j.value("boxes", json::array())) {
    BoxSpec box;
    box.center = vec3(b.at("center"));
    box.size = vec3(b.at("size"));
    box.reflectivity = b.value("reflectivity", 0.5);
    if (b.contains("velocity")) box.velocity = vec3(b.at("velocity"));
    scene.boxes.push_back(box);
  }
  for (const json& c : j.value("cylinders", json::array())) {
    CylinderSpec cyl;
    cyl.center = vec2(c.at("center"));
    cyl.radius = c.at("radius").get<double>();
    cyl.z_min = c.value("z_min", 0.0);
    cyl.z_max = c.value("z_max", 2.0);
    cyl.reflectivity = c.value("reflectivity", 0.5);
    if (c.contains("velocity")) cyl.velocity = vec2(c.at("velocity"));
    scene.cylinders.push_back(cyl);
  }
  for (const json& k : j.at("trajectory")) {
    TrajectoryKnot knot;
    knot.t = k.at("t").get<double>();
    const Eigen::Vector3d p = k.contains("position") ? vec3(k.at("position"))
                                                     : Eigen::Vector3d::Zero();
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    if (k.contains("quaternion")) {
      const json& v = k.at("quaternion");  // [qx, qy, qz, qw]
      q = Eigen::Quaterniond(v.at(3).get<double>(), v.at(0).get<double>(),
                             v.at(1).get<double>(), v.at(2).get<double>());
    } else if (k.contains("yaw_deg")) {
      q = Eigen::Quaterniond(Eigen::AngleAxisd(
          k.at("yaw_deg").get<double>() * kDegToRad, Eigen::Vector3d::UnitZ()));
    }
    knot.pose = PoseSE3(q, p);
    scene.trajectory.push_back(knot);
  }
  if (j.contains("sensor")) {
    const json& s = j.at("sensor");
    SensorModel& m = scene.sensor;
    m.azimuth_count = s.value("azimuth_count", m.azimuth_count);
    m.elevation_count = s.value("elevation_count", m.elevation_count);
    m.azimuth_start = s.value("azimuth_start_deg", 0.0) * kDegToRad;
    m.azimuth_span = s.value("azimuth_span_deg", 360.0) * kDegToRad;
    if (s.contains("elevation_fov_deg")) {
      m.elevation_min = s.at("elevation_fov_deg").at(0).get<double>() * kDegToRad;
      m.elevation_max = s.at("elevation_fov_deg").at(1).get<double>() * kDegToRad;
    }
    m.max_range = s.value("max_range", m.max_range);
    m.noise_sigma = s.value("noise_sigma", m.noise_sigma);
    m.seed = s.value("seed", m.seed);
  }
  return scene;
}

std::string scene_to_json(const SceneSpec& scene) {
  json j;
  j["ground"] = {{"normal", to_json(scene.ground.normal)},
                 {"d", scene.ground.d},
                 {"reflectivity", scene.ground_reflectivity}};
  j["boxes"] = json::array();
  for (const BoxSpec& b : scene.boxes) {
    json jb;
    jb["center"] = to_json(b.center);
    jb["size"] = to_json(b.size);
    jb["reflectivity"] = b.reflectivity;
    jb["velocity"] = to_json(b.velocity);
    j["boxes"].push_back(jb);
  }
  j["cylinders"] = json::array();
  for (const CylinderSpec& c : scene.cylinders) {
    json jc;
    jc["center"] = to_json(c.center);
    jc["radius"] = c.radius;
    jc["z_min"] = c.z_min;
    jc["z_max"] = c.z_max;
    jc["reflectivity"] = c.reflectivity;
    jc["velocity"] = to_json(c.velocity);
    j["cylinders"].push_back(jc);
  }
  j["trajectory"] = json::array();
  for (const TrajectoryKnot& k : scene.trajectory) {
    json jk;
    jk["t"] = k.t;
    jk["position"] = to_json(k.pose.translation);
    const Eigen::Quaterniond& q = k.pose.rotation;
    jk["quaternion"] = json::array({q.x(), q.y(), q.z(), q.w()});
    j["trajectory"].push_back(jk);
  }
  const SensorModel& m = scene.sensor;
  j["sensor"] = {{"azimuth_count", m.azimuth_count},
                 {"elevation_count", m.elevation_count},
                 {"azimuth_start_deg", m.azimuth_start / kDegToRad},
                 {"azimuth_span_deg", m.azimuth_span / kDegToRad},
                 {"elevation_fov_deg",
                  json::array({m.elevation_min / kDegToRad,
                               m.elevation_max / kDegToRad})},
                 {"max_range", m.max_range},
                 {"noise_sigma", m.noise_sigma},
                 {"seed", m.seed}};
  return j.dump(2) + "\n";
}

}  // namespace evigrid::synth
