#include "evigrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evigrid {

namespace {

void require_aligned(const BeliefGrid& pred, const BeliefGrid& target) {
  if (!pred.spec().same_shape(target.spec())) {
    throw std::invalid_argument("metrics: grid geometries differ");
  }
}

}  // namespace

CellResiduals cell_residuals(const BeliefCell& target, const BeliefCell& pred) {
  return {target.occupied - pred.occupied, target.free - pred.free};
}

double certainty_weight(const BeliefCell& target, double k) {
  const double certainty = target.occupied + target.free;
  return 1.0 + k * (certainty - 1.0);
}

double asymmetric_l1(const CellResiduals& r, double k, int sign) {
  return cell_l1(r) + static_cast<double>(sign) * k * r.free;
}

double aggregate_loss(const BeliefGrid& pred, const BeliefGrid& target,
                      const LossOptions& options) {
  require_aligned(pred, target);
  double weight_sum = 0.0;
  double loss_sum = 0.0;
  const auto& pc = pred.cells();
  const auto& tc = target.cells();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const CellResiduals r = cell_residuals(tc[i], pc[i]);
    double l = 0.0;
    switch (options.loss) {
      case CellLossKind::kL1:
        l = cell_l1(r);
        break;
      case CellLossKind::kL2:
        l = cell_l2(r);
        break;
      case CellLossKind::kAsymmetricL1:
        l = asymmetric_l1(r, options.asym_k, options.asym_sign);
        break;
    }
    const double w = certainty_weight(tc[i], options.certainty_k);
    weight_sum += w;
    loss_sum += w * l;
  }
  if (!(weight_sum > 0.0)) {
    throw std::invalid_argument("aggregate_loss: zero weight sum");
  }
  return loss_sum / weight_sum;
}

double false_occupied(const BeliefGrid& pred, const BeliefGrid& target) {
  require_aligned(pred, target);
  double sum = 0.0;
  const auto& pc = pred.cells();
  const auto& tc = target.cells();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    sum += std::max(0.0, pc[i].occupied + tc[i].free - 1.0);
  }
  return sum / static_cast<double>(pc.size());
}

double false_free(const BeliefGrid& pred, const BeliefGrid& target) {
  require_aligned(pred, target);
  double sum = 0.0;
  const auto& pc = pred.cells();
  const auto& tc = target.cells();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    sum += std::max(0.0, tc[i].occupied + pc[i].free - 1.0);
  }
  return sum / static_cast<double>(pc.size());
}

double relative_uncertainty(const BeliefGrid& pred, const BeliefGrid& target,
                            double eps) {
  require_aligned(pred, target);
  double pred_sum = 0.0;
  double target_sum = 0.0;
  const auto& pc = pred.cells();
  const auto& tc = target.cells();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    pred_sum += 1.0 - pc[i].occupied - pc[i].free;
    target_sum += 1.0 - tc[i].occupied - tc[i].free;
  }
  if (target_sum < eps) {
    throw std::domain_error(
        "relative_uncertainty: target uncertainty sum vanishes");
  }
  return pred_sum / target_sum;
}

MetricReport evaluate_grids(const BeliefGrid& pred, const BeliefGrid& target,
                            double rel_unc_eps) {
  MetricReport report;
  report.l1 = aggregate_loss(pred, target, {CellLossKind::kL1, 0.0, 0.0, 1});
  report.l2 = aggregate_loss(pred, target, {CellLossKind::kL2, 0.0, 0.0, 1});
  report.false_occupied = false_occupied(pred, target);
  report.false_free = false_free(pred, target);
  report.rel_unc = relative_uncertainty(pred, target, rel_unc_eps);
  report.cells = pred.cells().size();
  report.weight_sum = static_cast<double>(pred.cells().size());
  return report;
}

std::vector<double> per_cell_metric(const BeliefGrid& pred,
                                    const BeliefGrid& target,
                                    CellMetric kind) {
  require_aligned(pred, target);
  const auto& pc = pred.cells();
  const auto& tc = target.cells();
  std::vector<double> out(pc.size(), 0.0);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const CellResiduals r = cell_residuals(tc[i], pc[i]);
    switch (kind) {
      case CellMetric::kL1:
        out[i] = cell_l1(r);
        break;
      case CellMetric::kL2:
        out[i] = cell_l2(r);
        break;
      case CellMetric::kFalseOccupied:
        out[i] = std::max(0.0, pc[i].occupied + tc[i].free - 1.0);
        break;
      case CellMetric::kFalseFree:
        out[i] = std::max(0.0, tc[i].occupied + pc[i].free - 1.0);
        break;
    }
  }
  return out;
}

}  // namespace evigrid
