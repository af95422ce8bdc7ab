#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "evigrid/grid_map.hpp"

namespace evigrid {

// Per-cell residuals between target beliefs and predicted beliefs,
// eps = target - prediction per channel.
struct CellResiduals {
  double occupied = 0.0;  // eps_O
  double free = 0.0;      // eps_F
};

CellResiduals cell_residuals(const BeliefCell& target, const BeliefCell& pred);

inline double cell_l1(const CellResiduals& r) {
  return std::abs(r.occupied) + std::abs(r.free);
}
inline double cell_l2(const CellResiduals& r) {
  return r.occupied * r.occupied + r.free * r.free;
}

// w = 1 + k (C - 1) with target certainty C = bel(O) + bel(F); k = 0 keeps
// every cell at weight 1.
double certainty_weight(const BeliefCell& target, double k);

// l1 plus k * eps_F, as printed; sign = -1 flips the asymmetric term for the
// opposite reading (prediction overestimating free is penalized instead).
double asymmetric_l1(const CellResiduals& r, double k, int sign = 1);

enum class CellLossKind { kL1, kL2, kAsymmetricL1 };

struct LossOptions {
  CellLossKind loss = CellLossKind::kL1;
  double certainty_k = 0.0;  // 0 means uniform weights
  double asym_k = 0.0;
  int asym_sign = 1;
};

// Weighted average of the per-cell loss over aligned grids:
// L = (sum w)^-1 sum w * l. Throws on geometry mismatch or zero weight sum.
double aggregate_loss(const BeliefGrid& pred, const BeliefGrid& target,
                      const LossOptions& options = {});

// Mean over cells of max(0, bel'(O) + bel(F) - 1): predicted occupancy
// contradicting target free space.
double false_occupied(const BeliefGrid& pred, const BeliefGrid& target);
// Mean over cells of max(0, bel(O) + bel'(F) - 1).
double false_free(const BeliefGrid& pred, const BeliefGrid& target);

// Ratio of summed predicted uncertainty to summed target uncertainty.
// Throws std::domain_error when the target uncertainty sum is below eps.
double relative_uncertainty(const BeliefGrid& pred, const BeliefGrid& target,
                            double eps = 1e-6);

struct MetricReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double false_occupied = 0.0;
  double false_free = 0.0;
  double rel_unc = 1.0;
  std::size_t cells = 0;
  double weight_sum = 0.0;
};

MetricReport evaluate_grids(const BeliefGrid& pred, const BeliefGrid& target,
                            double rel_unc_eps = 1e-6);

// Per-cell metric field for heatmap export.
enum class CellMetric { kL1, kL2, kFalseOccupied, kFalseFree };
std::vector<double> per_cell_metric(const BeliefGrid& pred,
                                    const BeliefGrid& target, CellMetric kind);

}  // namespace evigrid
