#include "evigrid/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace evigrid {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'S', '1'};

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

template <typename T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated file: " + path);
  return value;
}

}  // namespace

void write_scan_evs1(const PointCloud& cloud, const std::string& path) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic, 4);
  put(out, static_cast<std::uint32_t>(cloud.size()));
  put(out, cloud.timestamp);
  for (const Point3& p : cloud.points) {
    put(out, static_cast<float>(p.x));
    put(out, static_cast<float>(p.y));
    put(out, static_cast<float>(p.z));
    put(out, static_cast<float>(p.intensity));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PointCloud read_scan_evs1(const std::string& path, ScanLoadStats* stats) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not an EVS1 file: " + path);
  }
  const auto count = get<std::uint32_t>(in, path);
  PointCloud cloud;
  cloud.timestamp = get<double>(in, path);
  cloud.scan_id = std::filesystem::path(path).stem().string();
  cloud.points.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto x = get<float>(in, path);
    const auto y = get<float>(in, path);
    const auto z = get<float>(in, path);
    auto intensity = get<float>(in, path);
    if (intensity < 0.0f || intensity > 1.0f) {
      intensity = std::clamp(intensity, 0.0f, 1.0f);
      if (stats != nullptr) ++stats->clamped_intensities;
    }
    cloud.points.emplace_back(x, y, z, intensity);
  }
  return cloud;
}

void write_pose_file(const std::vector<std::string>& scan_ids,
                     const std::vector<PoseSE3>& poses,
                     const std::string& path) {
  if (scan_ids.size() != poses.size()) {
    throw std::invalid_argument("write_pose_file: id/pose count mismatch");
  }
  auto out = open_out(path, std::ios::out);
  char line[512];
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const PoseSE3& p = poses[i];
    std::snprintf(line, sizeof(line),
                  "%s %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  scan_ids[i].c_str(), p.translation.x(), p.translation.y(),
                  p.translation.z(), p.rotation.x(), p.rotation.y(),
                  p.rotation.z(), p.rotation.w());
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::pair<std::string, PoseSE3>> read_pose_file(
    const std::string& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<std::pair<std::string, PoseSE3>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string id;
    double tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> id >> tx >> ty >> tz >> qx >> qy >> qz >> qw)) {
      throw std::runtime_error("malformed pose line in " + path + ": " + line);
    }
    out.emplace_back(id, PoseSE3(Eigen::Quaterniond(qw, qx, qy, qz),
                                 Eigen::Vector3d(tx, ty, tz)));
  }
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path) {
  nlohmann::json j;
  j["scans"] = nlohmann::json::array();
  for (const ManifestEntry& e : entries) {
    j["scans"].push_back(
        {{"id", e.id}, {"path", e.path}, {"timestamp", e.timestamp}});
  }
  write_text_file(j.dump(2) + "\n", path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  std::vector<ManifestEntry> out;
  for (const auto& e : j.at("scans")) {
    out.push_back({e.at("id").get<std::string>(),
                   e.at("path").get<std::string>(),
                   e.at("timestamp").get<double>()});
  }
  return out;
}

ScanSequence load_sequence(const std::string& manifest_path,
                           const std::optional<std::string>& pose_path,
                           ScanLoadStats* stats) {
  const auto entries = read_manifest(manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();

  ScanSequence seq;
  for (const ManifestEntry& e : entries) {
    std::filesystem::path scan_path(e.path);
    if (scan_path.is_relative()) scan_path = base / scan_path;
    PointCloud cloud = read_scan_evs1(scan_path.string(), stats);
    cloud.scan_id = e.id;
    cloud.timestamp = e.timestamp;
    seq.scans.push_back(std::move(cloud));
  }
  std::sort(seq.scans.begin(), seq.scans.end(),
            [](const PointCloud& a, const PointCloud& b) {
              return a.timestamp < b.timestamp;
            });

  if (pose_path.has_value()) {
    std::unordered_map<std::string, PoseSE3> by_id;
    for (auto& [id, pose] : read_pose_file(*pose_path)) by_id.emplace(id, pose);
    for (const PointCloud& scan : seq.scans) {
      const auto it = by_id.find(scan.scan_id);
      if (it == by_id.end()) {
        throw std::runtime_error("no pose for scan '" + scan.scan_id + "'");
      }
      seq.poses.push_back(it->second);
    }
  }
  seq.validate();
  return seq;
}

void write_plane_json(const PlaneParams& plane, const std::string& path) {
  nlohmann::json j;
  j["nx"] = plane.normal.x();
  j["ny"] = plane.normal.y();
  j["nz"] = plane.normal.z();
  j["d"] = plane.d;
  write_text_file(j.dump(2) + "\n", path);
}

PlaneParams read_plane_json(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  PlaneParams plane;
  plane.normal = Eigen::Vector3d(j.at("nx").get<double>(),
                                 j.at("ny").get<double>(),
                                 j.at("nz").get<double>())
                     .normalized();
  plane.d = j.at("d").get<double>();
  return plane;
}

void write_labels(const std::vector<int>& labels, const std::string& path) {
  auto out = open_out(path, std::ios::out);
  for (const int label : labels) out << label << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<int> read_labels(const std::string& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<int> out;
  int v;
  while (in >> v) out.push_back(v);
  return out;
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& text, const std::string& path) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace evigrid
