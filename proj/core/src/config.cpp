#include "evigrid/config.hpp"

#include <nlohmann/json.hpp>

namespace evigrid {

namespace {
using nlohmann::json;
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  PipelineConfig c;
  c.voxel_edge = j.value("voxel_edge", c.voxel_edge);
  c.cell_edge = j.value("cell_edge", c.cell_edge);
  c.map_extent = j.value("map_extent", c.map_extent);
  c.crop_size = j.value("crop_size", c.crop_size);
  c.window_seconds = j.value("window_seconds", c.window_seconds);
  c.corridor_low = j.value("corridor_low", c.corridor_low);
  c.corridor_high = j.value("corridor_high", c.corridor_high);
  c.ground_band = j.value("ground_band", c.ground_band);
  c.multipath_cutoff = j.value("multipath_cutoff", c.multipath_cutoff);
  c.cauchy_scale = j.value("cauchy_scale", c.cauchy_scale);
  c.gicp_batch = j.value("gicp_batch", c.gicp_batch);
  c.gicp_max_distance = j.value("gicp_max_distance", c.gicp_max_distance);
  c.covariance_k = j.value("covariance_k", c.covariance_k);
  c.covariance_epsilon = j.value("covariance_epsilon", c.covariance_epsilon);
  if (j.contains("evidence")) {
    const json& e = j.at("evidence");
    c.evidence.reflection_occupied =
        e.value("reflection_occupied", c.evidence.reflection_occupied);
    c.evidence.reflection_theta =
        e.value("reflection_theta", c.evidence.reflection_theta);
    c.evidence.transmission_free =
        e.value("transmission_free", c.evidence.transmission_free);
    c.evidence.transmission_theta =
        e.value("transmission_theta", c.evidence.transmission_theta);
    c.evidence.validate();
  }
  c.metric_certainty_k = j.value("metric_certainty_k", c.metric_certainty_k);
  c.metric_asym_k = j.value("metric_asym_k", c.metric_asym_k);
  c.metric_asym_sign = j.value("metric_asym_sign", c.metric_asym_sign);
  c.rel_unc_eps = j.value("rel_unc_eps", c.rel_unc_eps);
  c.threads = j.value("threads", c.threads);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::string PipelineConfig::to_json_text() const {
  json j;
  j["voxel_edge"] = voxel_edge;
  j["cell_edge"] = cell_edge;
  j["map_extent"] = map_extent;
  j["crop_size"] = crop_size;
  j["window_seconds"] = window_seconds;
  j["corridor_low"] = corridor_low;
  j["corridor_high"] = corridor_high;
  j["ground_band"] = ground_band;
  j["multipath_cutoff"] = multipath_cutoff;
  j["cauchy_scale"] = cauchy_scale;
  j["gicp_batch"] = gicp_batch;
  j["gicp_max_distance"] = gicp_max_distance;
  j["covariance_k"] = covariance_k;
  j["covariance_epsilon"] = covariance_epsilon;
  j["evidence"] = {{"reflection_occupied", evidence.reflection_occupied},
                   {"reflection_theta", evidence.reflection_theta},
                   {"transmission_free", evidence.transmission_free},
                   {"transmission_theta", evidence.transmission_theta}};
  j["metric_certainty_k"] = metric_certainty_k;
  j["metric_asym_k"] = metric_asym_k;
  j["metric_asym_sign"] = metric_asym_sign;
  j["rel_unc_eps"] = rel_unc_eps;
  j["threads"] = threads;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

GridSpec2D PipelineConfig::map_spec(const Eigen::Vector2d& center) const {
  return GridSpec2D::centered(center, map_extent, cell_edge);
}

PlaneFitOptions PipelineConfig::plane_fit_options() const {
  PlaneFitOptions o;
  o.cauchy_scale = cauchy_scale;
  return o;
}

InputGridParams PipelineConfig::input_grid_params() const {
  return {ground_band, multipath_cutoff};
}

TargetGridParams PipelineConfig::target_grid_params() const {
  TargetGridParams p;
  p.window_seconds = window_seconds;
  p.corridor_low = corridor_low;
  p.corridor_high = corridor_high;
  p.evidence = evidence;
  p.plane_fit = plane_fit_options();
  return p;
}

SequenceRegistrationOptions PipelineConfig::registration_options() const {
  SequenceRegistrationOptions o;
  o.batch_size = gicp_batch;
  o.gicp.max_correspondence_distance = gicp_max_distance;
  o.gicp.covariance_k = covariance_k;
  o.gicp.covariance_epsilon = covariance_epsilon;
  o.threads = threads;
  return o;
}

}  // namespace evigrid
