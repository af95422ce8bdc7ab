#include "evigrid/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "evigrid/io.hpp"

namespace evigrid {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kVoxelMagic[4] = {'E', 'V', 'X', '1'};

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

std::uint16_t to_u16(double value01) {
  return static_cast<std::uint16_t>(
      std::lround(std::clamp(value01, 0.0, 1.0) * 65535.0));
}

std::vector<std::uint16_t> counts_to_samples(
    const std::vector<std::uint32_t>& counts) {
  std::vector<std::uint16_t> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<std::uint16_t>(std::min<std::uint32_t>(counts[i], 65535));
  }
  return out;
}

json spec_to_json(const GridSpec2D& spec) {
  return {{"origin", {spec.origin.x(), spec.origin.y()}},
          {"cell_edge", spec.cell_edge},
          {"width", spec.width},
          {"height", spec.height}};
}

GridSpec2D spec_from_json(const json& j) {
  GridSpec2D spec;
  spec.origin =
      Eigen::Vector2d(j.at("origin").at(0).get<double>(),
                      j.at("origin").at(1).get<double>());
  spec.cell_edge = j.at("cell_edge").get<double>();
  spec.width = j.at("width").get<std::int32_t>();
  spec.height = j.at("height").get<std::int32_t>();
  return spec;
}

void write_sidecar(const GridSpec2D& spec, const std::string& type,
                   const std::vector<std::pair<std::string, double>>& layers,
                   const std::string& config_json, const std::string& dir) {
  json j = spec_to_json(spec);
  j["type"] = type;
  j["layers"] = json::array();
  for (const auto& [name, scale] : layers) {
    j["layers"].push_back(
        {{"name", name}, {"file", name + ".pgm"}, {"scale", scale}});
  }
  j["config"] = json::parse(config_json);
  write_text_file(j.dump(2) + "\n", (fs::path(dir) / "grid.json").string());
}

json read_sidecar(const std::string& dir) {
  return json::parse(read_text_file((fs::path(dir) / "grid.json").string()));
}

}  // namespace

void save_voxel_map(const EvidentialVoxelMap& map, const std::string& path) {
  struct Record {
    VoxelIndex index;
    VoxelCounts counts;
  };
  std::vector<Record> records;
  records.reserve(map.size());
  for (const auto& [index, counts] : map.voxels()) {
    records.push_back({index, counts});
  }
  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    if (a.index.x != b.index.x) return a.index.x < b.index.x;
    if (a.index.y != b.index.y) return a.index.y < b.index.y;
    return a.index.z < b.index.z;
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kVoxelMagic, 4);
  put(out, map.geometry().edge);
  put(out, map.geometry().origin.x());
  put(out, map.geometry().origin.y());
  put(out, map.geometry().origin.z());
  put(out, static_cast<std::uint64_t>(records.size()));
  for (const Record& r : records) {
    put(out, r.index.x);
    put(out, r.index.y);
    put(out, r.index.z);
    put(out, r.counts.reflections);
    put(out, r.counts.transmissions);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EvidentialVoxelMap load_voxel_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kVoxelMagic, 4) != 0) {
    throw std::runtime_error("not an EVX1 file: " + path);
  }
  VoxelGridGeometry geom;
  geom.edge = get<double>(in, path);
  geom.origin.x() = get<double>(in, path);
  geom.origin.y() = get<double>(in, path);
  geom.origin.z() = get<double>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  EvidentialVoxelMap map(geom);
  for (std::uint64_t i = 0; i < count; ++i) {
    VoxelIndex index;
    index.x = get<std::int32_t>(in, path);
    index.y = get<std::int32_t>(in, path);
    index.z = get<std::int32_t>(in, path);
    VoxelCounts counts;
    counts.reflections = get<std::uint32_t>(in, path);
    counts.transmissions = get<std::uint32_t>(in, path);
    map.insert(index, counts);
  }
  return map;
}

void write_pgm16(const std::vector<std::uint16_t>& samples, std::int32_t width,
                 std::int32_t height, const std::string& path) {
  if (samples.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_pgm16: sample count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(width) * 2);
  for (std::int32_t y = height - 1; y >= 0; --y) {
    for (std::int32_t x = 0; x < width; ++x) {
      const std::uint16_t v = samples[static_cast<std::size_t>(y) * width + x];
      row[2 * x] = static_cast<unsigned char>(v >> 8);  // big-endian per spec
      row[2 * x + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint16_t> read_pgm16(const std::string& path,
                                      std::int32_t* width,
                                      std::int32_t* height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string magic;
  long w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 65535 || w <= 0 || h <= 0) {
    throw std::runtime_error("not a 16-bit PGM: " + path);
  }
  in.get();  // single whitespace after header
  std::vector<std::uint16_t> samples(static_cast<std::size_t>(w) * h);
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
  for (long y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!in) throw std::runtime_error("truncated PGM: " + path);
    for (long x = 0; x < w; ++x) {
      samples[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint16_t>(
          (row[2 * x] << 8) | row[2 * x + 1]);
    }
  }
  *width = static_cast<std::int32_t>(w);
  *height = static_cast<std::int32_t>(h);
  return samples;
}

void save_belief_grid(const BeliefGrid& grid, const std::string& dir,
                      const std::string& config_json) {
  fs::create_directories(dir);
  const GridSpec2D& spec = grid.spec();
  std::vector<std::uint16_t> occupied(spec.cell_count());
  std::vector<std::uint16_t> free(spec.cell_count());
  for (std::size_t i = 0; i < grid.cells().size(); ++i) {
    occupied[i] = to_u16(grid.cells()[i].occupied);
    free[i] = to_u16(grid.cells()[i].free);
  }
  write_pgm16(occupied, spec.width, spec.height,
              (fs::path(dir) / "bel_occupied.pgm").string());
  write_pgm16(free, spec.width, spec.height,
              (fs::path(dir) / "bel_free.pgm").string());
  write_sidecar(spec, "belief",
                {{"bel_occupied", 1.0 / 65535.0}, {"bel_free", 1.0 / 65535.0}},
                config_json, dir);
}

BeliefGrid load_belief_grid(const std::string& dir) {
  const json j = read_sidecar(dir);
  if (j.at("type").get<std::string>() != "belief") {
    throw std::runtime_error("not a belief grid: " + dir);
  }
  const GridSpec2D spec = spec_from_json(j);
  BeliefGrid grid(spec);
  std::int32_t w = 0, h = 0;
  const auto occupied =
      read_pgm16((fs::path(dir) / "bel_occupied.pgm").string(), &w, &h);
  const auto free =
      read_pgm16((fs::path(dir) / "bel_free.pgm").string(), &w, &h);
  if (w != spec.width || h != spec.height) {
    throw std::runtime_error("grid shape mismatch in " + dir);
  }
  for (std::size_t i = 0; i < grid.cells().size(); ++i) {
    grid.cells()[i] = {occupied[i] / 65535.0, free[i] / 65535.0};
  }
  return grid;
}

void save_multilayer_grid(const MultiLayerGridMap& grid, const std::string& dir,
                          const std::string& config_json) {
  fs::create_directories(dir);
  const GridSpec2D& spec = grid.spec();

  const auto write_counts = [&](const std::vector<std::uint32_t>& counts,
                                const char* name) {
    write_pgm16(counts_to_samples(counts), spec.width, spec.height,
                (fs::path(dir) / (std::string(name) + ".pgm")).string());
  };
  const auto write_unit = [&](const std::vector<double>& values,
                              const char* name) {
    std::vector<std::uint16_t> samples(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) samples[i] = to_u16(values[i]);
    write_pgm16(samples, spec.width, spec.height,
                (fs::path(dir) / (std::string(name) + ".pgm")).string());
  };

  write_counts(grid.detections_ground, "detections_ground");
  write_counts(grid.detections_non_ground, "detections_non_ground");
  write_counts(grid.transmissions_ground, "transmissions_ground");
  write_counts(grid.transmissions_non_ground, "transmissions_non_ground");
  write_unit(grid.intensity_ground, "intensity_ground");
  write_unit(grid.intensity_non_ground, "intensity_non_ground");

  write_sidecar(spec, "multilayer",
                {{"detections_ground", 1.0},
                 {"detections_non_ground", 1.0},
                 {"transmissions_ground", 1.0},
                 {"transmissions_non_ground", 1.0},
                 {"intensity_ground", 1.0 / 65535.0},
                 {"intensity_non_ground", 1.0 / 65535.0}},
                config_json, dir);
}

MultiLayerGridMap load_multilayer_grid(const std::string& dir) {
  const json j = read_sidecar(dir);
  if (j.at("type").get<std::string>() != "multilayer") {
    throw std::runtime_error("not a multilayer grid: " + dir);
  }
  const GridSpec2D spec = spec_from_json(j);
  MultiLayerGridMap grid(spec);

  const auto read_counts = [&](std::vector<std::uint32_t>& counts,
                               const char* name) {
    std::int32_t w = 0, h = 0;
    const auto samples =
        read_pgm16((fs::path(dir) / (std::string(name) + ".pgm")).string(), &w, &h);
    if (w != spec.width || h != spec.height) {
      throw std::runtime_error("grid shape mismatch in " + dir);
    }
    counts.assign(samples.begin(), samples.end());
  };
  const auto read_unit = [&](std::vector<double>& values, const char* name) {
    std::int32_t w = 0, h = 0;
    const auto samples =
        read_pgm16((fs::path(dir) / (std::string(name) + ".pgm")).string(), &w, &h);
    if (w != spec.width || h != spec.height) {
      throw std::runtime_error("grid shape mismatch in " + dir);
    }
    values.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = samples[i] / 65535.0;
  };

  read_counts(grid.detections_ground, "detections_ground");
  read_counts(grid.detections_non_ground, "detections_non_ground");
  read_counts(grid.transmissions_ground, "transmissions_ground");
  read_counts(grid.transmissions_non_ground, "transmissions_non_ground");
  read_unit(grid.intensity_ground, "intensity_ground");
  read_unit(grid.intensity_non_ground, "intensity_non_ground");
  return grid;
}

GridKind peek_grid_kind(const std::string& dir) {
  const std::string type = read_sidecar(dir).at("type").get<std::string>();
  if (type == "belief") return GridKind::kBelief;
  if (type == "multilayer") return GridKind::kMultiLayer;
  throw std::runtime_error("unknown grid type '" + type + "' in " + dir);
}

std::vector<std::string> grid_layer_names(const std::string& dir) {
  const json sidecar = read_sidecar(dir);
  std::vector<std::string> out;
  for (const auto& layer : sidecar.at("layers")) {
    out.push_back(layer.at("name").get<std::string>());
  }
  return out;
}

std::vector<double> normalized_layer(const BeliefGrid& grid,
                                     const std::string& layer) {
  std::vector<double> out(grid.cells().size());
  if (layer == "bel_occupied") {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid.cells()[i].occupied;
  } else if (layer == "bel_free") {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid.cells()[i].free;
  } else {
    throw std::invalid_argument("unknown belief layer: " + layer);
  }
  return out;
}

std::vector<double> normalized_layer(const MultiLayerGridMap& grid,
                                     const std::string& layer) {
  const auto from_counts = [](const std::vector<std::uint32_t>& counts) {
    const std::uint32_t peak =
        counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    std::vector<double> out(counts.size(), 0.0);
    if (peak == 0) return out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out[i] = static_cast<double>(counts[i]) / peak;
    }
    return out;
  };
  if (layer == "detections_ground") return from_counts(grid.detections_ground);
  if (layer == "detections_non_ground") return from_counts(grid.detections_non_ground);
  if (layer == "transmissions_ground") return from_counts(grid.transmissions_ground);
  if (layer == "transmissions_non_ground") {
    return from_counts(grid.transmissions_non_ground);
  }
  if (layer == "intensity_ground") return grid.intensity_ground;
  if (layer == "intensity_non_ground") return grid.intensity_non_ground;
  throw std::invalid_argument("unknown multilayer layer: " + layer);
}

namespace {

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::ofstream& out, const char type[4],
               const std::vector<unsigned char>& data) {
  std::vector<unsigned char> head;
  put_be32(head, static_cast<std::uint32_t>(data.size()));
  out.write(reinterpret_cast<const char*>(head.data()), head.size());
  std::vector<unsigned char> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, body.data(), static_cast<uInt>(body.size())));
  out.write(reinterpret_cast<const char*>(body.data()), body.size());
  std::vector<unsigned char> tail;
  put_be32(tail, crc);
  out.write(reinterpret_cast<const char*>(tail.data()), tail.size());
}

}  // namespace

void write_png_heatmap(const std::vector<double>& values, std::int32_t width,
                       std::int32_t height, const std::string& path) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_png_heatmap: value count mismatch");
  }
  // Filtered RGB scanlines, filter type 0, top row is the highest y row.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
  for (std::int32_t y = height - 1; y >= 0; --y) {
    raw.push_back(0);
    for (std::int32_t x = 0; x < width; ++x) {
      const double v =
          std::clamp(values[static_cast<std::size_t>(y) * width + x], 0.0, 1.0);
      const auto fade = static_cast<unsigned char>(std::lround(255.0 * (1.0 - v)));
      raw.push_back(255);   // red stays saturated, white at v = 0
      raw.push_back(fade);
      raw.push_back(fade);
    }
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(),
                static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw std::runtime_error("png deflate failed");
  }
  compressed.resize(compressed_size);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  static const unsigned char signature[8] = {0x89, 'P', 'N', 'G',
                                             '\r', '\n', 0x1A, '\n'};
  out.write(reinterpret_cast<const char*>(signature), 8);

  std::vector<unsigned char> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace evigrid
