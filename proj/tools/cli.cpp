#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evigrid/config.hpp"
#include "evigrid/grid_io.hpp"
#include "evigrid/grid_map.hpp"
#include "evigrid/io.hpp"
#include "evigrid/metrics.hpp"
#include "evigrid/registration.hpp"
#include "evigrid/synth.hpp"
#include "evigrid/voxel_map.hpp"

namespace evigrid::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct CommonArgs {
  std::string config_path;
  int threads = -1;  // -1 = not set on the command line
};

void add_common(CLI::App* cmd, CommonArgs* common) {
  cmd->add_option("--config", common->config_path,
                  "Pipeline configuration JSON; omitted fields keep defaults");
  cmd->add_option("--threads", common->threads, "Worker thread cap");
}

PipelineConfig resolve_config(const CommonArgs& common) {
  PipelineConfig config;
  if (!common.config_path.empty()) {
    config = PipelineConfig::from_json_text(read_text_file(common.config_path));
  }
  if (common.threads >= 0) {
    config.threads = common.threads;
  } else if (config.threads == 0) {
    if (const char* env = std::getenv("EVIGRID_THREADS")) {
      config.threads = std::atoi(env);
    }
  }
  return config;
}

void echo_config_file(const PipelineConfig& config, const fs::path& path) {
  write_text_file(config.to_json_text(), path.string());
}

void echo_config_for_output(const PipelineConfig& config, const fs::path& out,
                            bool is_directory) {
  if (is_directory) {
    fs::create_directories(out);
    echo_config_file(config, out / "config.json");
  } else {
    echo_config_file(config, fs::path(out.string() + ".config.json"));
  }
}

// Center scan of a sequence: explicit id, or the middle scan by order.
std::size_t center_index(const ScanSequence& seq, const std::string& center_id) {
  if (center_id.empty()) return seq.scans.size() / 2;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    if (seq.scans[i].scan_id == center_id) return i;
  }
  throw std::runtime_error("unknown scan id '" + center_id + "'");
}

int cmd_synth(const std::string& scene_path, const std::string& out_dir,
              double rate, double duration, const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  synth::SceneSpec scene = synth::scene_from_json(read_text_file(scene_path));
  if (config.seed != 0) scene.sensor.seed = config.seed;
  if (duration <= 0.0) {
    duration = scene.trajectory.back().t - scene.trajectory.front().t;
  }
  const synth::SimulatedSequence sim =
      synth::simulate_sequence(scene, rate, duration);

  const fs::path dir(out_dir);
  fs::create_directories(dir / "scans");
  fs::create_directories(dir / "labels");
  std::vector<ManifestEntry> entries;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < sim.sequence.scans.size(); ++i) {
    const PointCloud& scan = sim.sequence.scans[i];
    const std::string rel = "scans/" + scan.scan_id + ".evs1";
    write_scan_evs1(scan, (dir / rel).string());
    write_labels(sim.labels[i],
                 (dir / "labels" / (scan.scan_id + ".labels")).string());
    entries.push_back({scan.scan_id, rel, scan.timestamp});
    ids.push_back(scan.scan_id);
  }
  write_manifest(entries, (dir / "manifest.json").string());
  write_pose_file(ids, sim.ground_truth, (dir / "gt_poses.txt").string());
  write_text_file(synth::scene_to_json(scene), (dir / "scene.json").string());
  echo_config_for_output(config, dir, true);
  std::cout << "synth: " << sim.sequence.scans.size() << " scans -> "
            << out_dir << "\n";
  return 0;
}

int cmd_register(const std::string& manifest_path, const std::string& out_path,
                 const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  const ScanSequence seq = load_sequence(manifest_path);
  const SequenceRegistrationResult result =
      register_sequence(seq, config.registration_options());
  std::vector<std::string> ids;
  for (const PointCloud& scan : result.sequence.scans) ids.push_back(scan.scan_id);
  write_pose_file(ids, result.sequence.poses, out_path);
  echo_config_for_output(config, out_path, false);
  if (!result.all_batches_converged) {
    std::cerr << R"({"warning": "one or more GICP batches hit the iteration limit"})"
              << "\n";
  }
  std::cout << "register: " << ids.size() << " poses -> " << out_path << "\n";
  return 0;
}

int cmd_ground_fit(const std::string& input_path,
                   const std::optional<std::string>& poses_path,
                   const std::string& out_path, const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  std::vector<Point3> points;
  if (fs::path(input_path).extension() == ".json") {
    const ScanSequence seq = load_sequence(input_path, poses_path);
    for (std::size_t i = 0; i < seq.scans.size(); ++i) {
      const PointCloud cloud =
          seq.has_poses() ? transform_cloud(seq.scans[i], seq.poses[i])
                          : seq.scans[i];
      points.insert(points.end(), cloud.points.begin(), cloud.points.end());
    }
  } else {
    points = read_scan_evs1(input_path).points;
  }
  const PlaneParams plane = fit_plane(points, config.plane_fit_options());
  write_plane_json(plane, out_path);
  echo_config_for_output(config, out_path, false);
  std::cout << "ground-fit: " << points.size() << " points -> " << out_path
            << "\n";
  return 0;
}

int cmd_voxelize(const std::string& manifest_path, const std::string& poses_path,
                 const std::string& out_path, const std::string& center_id,
                 bool use_window, const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  const ScanSequence seq = load_sequence(manifest_path, poses_path);
  const std::size_t center = center_index(seq, center_id);

  const Eigen::Vector3d sensor_world =
      seq.poses[center].apply(seq.scans[center].sensor_origin.position());
  const GridSpec2D spec =
      config.map_spec(Eigen::Vector2d(sensor_world.x(), sensor_world.y()));
  VoxelGridGeometry geom;
  geom.edge = config.voxel_edge;
  geom.origin = Eigen::Vector3d(spec.origin.x(), spec.origin.y(), 0.0);

  EvidentialVoxelMap map(geom);
  const double t_center = seq.scans[center].timestamp;
  std::size_t used = 0;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    if (use_window &&
        std::abs(seq.scans[i].timestamp - t_center) > config.window_seconds) {
      continue;
    }
    accumulate_scan(map, seq.scans[i], seq.poses[i]);
    ++used;
  }
  save_voxel_map(map, out_path);
  echo_config_for_output(config, out_path, false);
  std::cout << "voxelize: " << used << " scans, " << map.size()
            << " voxels -> " << out_path << "\n";
  return 0;
}

int cmd_project(const std::string& map_path, const std::string& plane_path,
                const std::string& out_dir, const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  const EvidentialVoxelMap map = load_voxel_map(map_path);
  const PlaneParams plane = read_plane_json(plane_path);
  const EvidentialVoxelMap corridor =
      segment_corridor(map, plane, config.corridor_low, config.corridor_high);

  GridSpec2D spec;
  spec.cell_edge = map.geometry().edge;
  spec.origin =
      Eigen::Vector2d(map.geometry().origin.x(), map.geometry().origin.y());
  spec.width = static_cast<std::int32_t>(
      std::lround(config.map_extent / spec.cell_edge));
  spec.height = spec.width;

  const BeliefGrid grid = project_map(corridor, spec, config.evidence);
  save_belief_grid(grid, out_dir, config.to_json_text());
  echo_config_for_output(config, out_dir, true);
  std::cout << "project: " << corridor.size() << " corridor voxels -> "
            << out_dir << "\n";
  return 0;
}

int cmd_input_grid(const std::string& scan_path, const std::string& plane_path,
                   const std::string& out_dir, const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  const PointCloud scan = read_scan_evs1(scan_path);
  const PlaneParams plane =
      plane_path.empty() ? fit_plane(scan.points, config.plane_fit_options())
                         : read_plane_json(plane_path);
  const GridSpec2D spec = config.map_spec(
      Eigen::Vector2d(scan.sensor_origin.x, scan.sensor_origin.y));
  const MultiLayerGridMap grid =
      build_input_grid(scan, plane, spec, config.input_grid_params());
  save_multilayer_grid(grid, out_dir, config.to_json_text());
  echo_config_for_output(config, out_dir, true);
  std::cout << "input-grid: " << scan.size() << " points -> " << out_dir
            << "\n";
  return 0;
}

int cmd_augment(const std::string& grid_dir, const std::string& out_dir,
                double rotation_deg, double dx, double dy, std::int32_t size,
                const CommonArgs& common) {
  const PipelineConfig config = resolve_config(common);
  const double rotation = rotation_deg * kDegToRad;
  const Eigen::Vector2d offset(dx, dy);
  const std::int32_t out_size = size > 0 ? size : config.crop_size;
  if (peek_grid_kind(grid_dir) == GridKind::kBelief) {
    const BeliefGrid grid = load_belief_grid(grid_dir);
    save_belief_grid(augment_crop(grid, rotation, offset, out_size), out_dir,
                     config.to_json_text());
  } else {
    const MultiLayerGridMap grid = load_multilayer_grid(grid_dir);
    save_multilayer_grid(augment_crop(grid, rotation, offset, out_size),
                         out_dir, config.to_json_text());
  }
  echo_config_for_output(config, out_dir, true);
  std::cout << "augment: " << grid_dir << " -> " << out_dir << "\n";
  return 0;
}

struct EvaluateArgs {
  double certainty_k = -1.0;  // negative: keep the config value
  double asym_k = -1.0;
  int asym_sign = 0;  // 0: keep the config value
};

int cmd_evaluate(const std::string& pred_dir, const std::string& target_dir,
                 const std::string& out_path, const std::string& heatmap_dir,
                 const EvaluateArgs& extra, const CommonArgs& common) {
  PipelineConfig config = resolve_config(common);
  if (extra.certainty_k >= 0.0) config.metric_certainty_k = extra.certainty_k;
  if (extra.asym_k >= 0.0) config.metric_asym_k = extra.asym_k;
  if (extra.asym_sign != 0) config.metric_asym_sign = extra.asym_sign;
  const BeliefGrid pred = load_belief_grid(pred_dir);
  const BeliefGrid target = load_belief_grid(target_dir);
  const MetricReport report = evaluate_grids(pred, target, config.rel_unc_eps);

  json j;
  j["l1"] = report.l1;
  j["l2"] = report.l2;
  j["false_occupied"] = report.false_occupied;
  j["false_free"] = report.false_free;
  j["rel_unc"] = report.rel_unc;
  j["cells"] = report.cells;
  j["weight_sum"] = report.weight_sum;
  if (config.metric_certainty_k > 0.0) {
    j["l1_certainty_weighted"] = aggregate_loss(
        pred, target, {CellLossKind::kL1, config.metric_certainty_k, 0.0, 1});
  }
  if (config.metric_asym_k > 0.0) {
    j["l1_asymmetric"] =
        aggregate_loss(pred, target,
                       {CellLossKind::kAsymmetricL1, 0.0, config.metric_asym_k,
                        config.metric_asym_sign});
  }
  j["config"] = json::parse(config.to_json_text());
  write_text_file(j.dump(2) + "\n", out_path);

  if (!heatmap_dir.empty()) {
    fs::create_directories(heatmap_dir);
    const auto save_map = [&](CellMetric kind, const char* name) {
      const std::vector<double> values = per_cell_metric(pred, target, kind);
      std::vector<std::uint16_t> samples(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        samples[i] = static_cast<std::uint16_t>(
            std::lround(std::clamp(values[i] / 2.0, 0.0, 1.0) * 65535.0));
      }
      write_pgm16(samples, pred.spec().width, pred.spec().height,
                  (fs::path(heatmap_dir) / (std::string(name) + ".pgm")).string());
    };
    save_map(CellMetric::kL1, "l1");
    save_map(CellMetric::kL2, "l2");
    save_map(CellMetric::kFalseOccupied, "false_occupied");
    save_map(CellMetric::kFalseFree, "false_free");
    echo_config_for_output(config, heatmap_dir, true);
  }
  std::cout << "evaluate: l1=" << report.l1 << " l2=" << report.l2
            << " false_occupied=" << report.false_occupied
            << " false_free=" << report.false_free
            << " rel_unc=" << report.rel_unc << " -> " << out_path << "\n";
  return 0;
}

int cmd_render(const std::string& grid_dir, const std::string& out,
               const std::string& layer, const CommonArgs& common) {
  resolve_config(common);  // validates --config if given
  const GridKind kind = peek_grid_kind(grid_dir);
  const auto layers = layer.empty() ? grid_layer_names(grid_dir)
                                    : std::vector<std::string>{layer};
  const bool single = !layer.empty();

  const auto render_one = [&](const std::vector<double>& values,
                              const GridSpec2D& spec, const std::string& name) {
    const fs::path path = single
                              ? fs::path(out)
                              : fs::path(out) / (name + ".png");
    if (!single) fs::create_directories(out);
    write_png_heatmap(values, spec.width, spec.height, path.string());
  };

  if (kind == GridKind::kBelief) {
    const BeliefGrid grid = load_belief_grid(grid_dir);
    for (const std::string& name : layers) {
      render_one(normalized_layer(grid, name), grid.spec(), name);
    }
  } else {
    const MultiLayerGridMap grid = load_multilayer_grid(grid_dir);
    for (const std::string& name : layers) {
      render_one(normalized_layer(grid, name), grid.spec(), name);
    }
  }
  std::cout << "render: " << layers.size() << " layer(s) -> " << out << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Evidential occupancy grid mapping pipeline"};
  app.require_subcommand(1);

  CommonArgs common;

  auto* synth_cmd = app.add_subcommand(
      "synth", "Simulate a scan sequence from a scene description");
  std::string scene_path, out;
  double rate = 1.0, duration = 0.0;
  synth_cmd->add_option("scene", scene_path, "Scene JSON")->required();
  synth_cmd->add_option("-o,--output", out, "Output directory")->required();
  synth_cmd->add_option("--rate", rate, "Scan rate in Hz");
  synth_cmd->add_option("--duration", duration,
                        "Sequence length in seconds (default: trajectory span)");
  add_common(synth_cmd, &common);

  auto* register_cmd =
      app.add_subcommand("register", "Register a scan sequence");
  std::string manifest, poses_out;
  register_cmd->add_option("manifest", manifest, "Sequence manifest JSON")
      ->required();
  register_cmd->add_option("-o,--output", poses_out, "Pose file")->required();
  add_common(register_cmd, &common);

  auto* ground_cmd = app.add_subcommand(
      "ground-fit", "Fit the ground plane of a scan or a registered sequence");
  std::string ground_input, ground_poses, plane_out;
  ground_cmd->add_option("input", ground_input, "EVS1 scan or manifest JSON")
      ->required();
  ground_cmd->add_option("--poses", ground_poses,
                         "Pose file (registers manifest scans before the fit)");
  ground_cmd->add_option("-o,--output", plane_out, "Plane JSON")->required();
  add_common(ground_cmd, &common);

  auto* voxelize_cmd = app.add_subcommand(
      "voxelize", "Accumulate registered scans into an evidential voxel map");
  std::string vox_manifest, vox_poses, vox_out, vox_center;
  bool vox_window = false;
  voxelize_cmd->add_option("manifest", vox_manifest, "Sequence manifest JSON")
      ->required();
  voxelize_cmd->add_option("poses", vox_poses, "Pose file")->required();
  voxelize_cmd->add_option("-o,--output", vox_out, "Voxel map file")->required();
  voxelize_cmd->add_option("--center", vox_center,
                           "Center scan id (default: middle scan)");
  voxelize_cmd->add_flag("--window", vox_window,
                         "Only accumulate scans within the time window");
  add_common(voxelize_cmd, &common);

  auto* project_cmd = app.add_subcommand(
      "project", "Corridor-segment a voxel map and project pillar beliefs");
  std::string prj_map, prj_plane, prj_out;
  project_cmd->add_option("map", prj_map, "Voxel map file")->required();
  project_cmd->add_option("plane", prj_plane, "Plane JSON")->required();
  project_cmd->add_option("-o,--output", prj_out, "Belief grid directory")
      ->required();
  add_common(project_cmd, &common);

  auto* input_cmd = app.add_subcommand(
      "input-grid", "Rasterize one scan into the six-layer input grid");
  std::string in_scan, in_plane, in_out;
  input_cmd->add_option("scan", in_scan, "EVS1 scan")->required();
  input_cmd->add_option("--plane", in_plane,
                        "Plane JSON (default: fit on the scan)");
  input_cmd->add_option("-o,--output", in_out, "Grid directory")->required();
  add_common(input_cmd, &common);

  auto* augment_cmd = app.add_subcommand(
      "augment", "Rotate, offset and crop a grid for augmentation");
  std::string aug_in, aug_out;
  double aug_rot = 0.0, aug_dx = 0.0, aug_dy = 0.0;
  std::int32_t aug_size = 0;
  augment_cmd->add_option("grid", aug_in, "Grid directory")->required();
  augment_cmd->add_option("-o,--output", aug_out, "Output grid directory")
      ->required();
  augment_cmd->add_option("--rotation-deg", aug_rot, "Crop rotation, degrees");
  augment_cmd->add_option("--offset-x", aug_dx, "Crop offset x, meters");
  augment_cmd->add_option("--offset-y", aug_dy, "Crop offset y, meters");
  augment_cmd->add_option("--size", aug_size,
                          "Output size in cells (default from config)");
  add_common(augment_cmd, &common);

  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Compare a predicted belief grid against a target");
  std::string ev_pred, ev_target, ev_out, ev_heatmaps;
  EvaluateArgs ev_extra;
  evaluate_cmd->add_option("prediction", ev_pred, "Predicted grid directory")
      ->required();
  evaluate_cmd->add_option("target", ev_target, "Target grid directory")
      ->required();
  evaluate_cmd->add_option("-o,--output", ev_out, "Metric report JSON")
      ->required();
  evaluate_cmd->add_option("--heatmaps", ev_heatmaps,
                           "Directory for per-cell metric PGMs");
  evaluate_cmd->add_option("--certainty-k", ev_extra.certainty_k,
                           "Weight scale k for the certainty-weighted loss");
  evaluate_cmd->add_option("--asym-k", ev_extra.asym_k,
                           "Scale k of the asymmetric l1 term");
  evaluate_cmd->add_option("--asym-sign", ev_extra.asym_sign,
                           "Sign of the asymmetric term (+1 as printed, -1 "
                           "penalizes overestimated free space)");
  add_common(evaluate_cmd, &common);

  auto* render_cmd =
      app.add_subcommand("render", "Render grid layers as PNG heatmaps");
  std::string rd_grid, rd_out, rd_layer;
  render_cmd->add_option("grid", rd_grid, "Grid directory")->required();
  render_cmd->add_option("-o,--output", rd_out,
                         "PNG path (with --layer) or output directory")
      ->required();
  render_cmd->add_option("--layer", rd_layer, "Single layer to render");
  add_common(render_cmd, &common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      return cmd_synth(scene_path, out, rate, duration, common);
    }
    if (register_cmd->parsed()) {
      return cmd_register(manifest, poses_out, common);
    }
    if (ground_cmd->parsed()) {
      return cmd_ground_fit(ground_input,
                            ground_poses.empty()
                                ? std::nullopt
                                : std::optional<std::string>(ground_poses),
                            plane_out, common);
    }
    if (voxelize_cmd->parsed()) {
      return cmd_voxelize(vox_manifest, vox_poses, vox_out, vox_center,
                          vox_window, common);
    }
    if (project_cmd->parsed()) {
      return cmd_project(prj_map, prj_plane, prj_out, common);
    }
    if (input_cmd->parsed()) {
      return cmd_input_grid(in_scan, in_plane, in_out, common);
    }
    if (augment_cmd->parsed()) {
      return cmd_augment(aug_in, aug_out, aug_rot, aug_dx, aug_dy, aug_size,
                         common);
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(ev_pred, ev_target, ev_out, ev_heatmaps, ev_extra,
                          common);
    }
    if (render_cmd->parsed()) {
      return cmd_render(rd_grid, rd_out, rd_layer, common);
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace evigrid::cli
