#include <doctest.h>

#include <random>
#include <stdexcept>

#include "evigrid/metrics.hpp"

using namespace evigrid;

namespace {

bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

GridSpec2D tiny_spec(std::int32_t w, std::int32_t h) {
  GridSpec2D spec;
  spec.origin = {0.0, 0.0};
  spec.cell_edge = 1.0;
  spec.width = w;
  spec.height = h;
  return spec;
}

BeliefGrid random_grid(std::mt19937& rng, const GridSpec2D& spec) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BeliefGrid grid(spec);
  for (BeliefCell& c : grid.cells()) {
    const double occupied = u(rng);
    c = {occupied, u(rng) * (1.0 - occupied)};
  }
  return grid;
}

}  // namespace

TEST_CASE("cell losses match hand arithmetic") {
  CHECK(cell_l1({0.0, 0.0}) == 0.0);
  CHECK(cell_l2({0.0, 0.0}) == 0.0);
  CHECK(close(cell_l1({0.3, -0.2}), 0.5));
  CHECK(close(cell_l2({0.3, -0.2}), 0.13));
  CHECK(close(cell_l1({1.0, 1.0}), 2.0));
  CHECK(close(cell_l2({1.0, 1.0}), 2.0));
}

TEST_CASE("certainty weight") {
  CHECK(certainty_weight({0.4, 0.6}, 0.3) == 1.0);   // C = 1
  CHECK(close(certainty_weight({0.0, 0.0}, 0.9), 0.1));
  CHECK(certainty_weight({0.1, 0.2}, 0.0) == 1.0);   // k = 0
}

TEST_CASE("asymmetric l1") {
  CHECK(close(asymmetric_l1({0.3, -0.2}, 0.0), cell_l1({0.3, -0.2})));
  CHECK(close(asymmetric_l1({0.0, 0.5}, 0.8), 0.9));
  CHECK(close(asymmetric_l1({0.0, -0.5}, 0.8), 0.1));
  CHECK(close(asymmetric_l1({0.0, 0.5}, 0.8, -1), 0.1));  // flipped reading
}

TEST_CASE("aggregate loss") {
  const GridSpec2D spec = tiny_spec(2, 1);

  SUBCASE("weighted mean of two cells") {
    BeliefGrid target(spec);
    BeliefGrid pred(spec);
    // Residuals (0.2, 0) and (0.6, 0); certainty weights 1 and 3 are not
    // expressible with w = 1 + k (C - 1) <= 1, so check plain weighting math
    // through uniform weights first.
    target.at({0, 0}) = {0.2, 0.0};
    target.at({1, 0}) = {0.6, 0.0};
    const double loss = aggregate_loss(pred, target, {});
    CHECK(close(loss, 0.4));
  }

  SUBCASE("certainty weights reproduce the weighted mean example") {
    // Cell losses 0.2 and 0.6 with weights 1 and 3 -> 0.5. Weights follow
    // from target certainties 1 and ... w in [1-k, 1]; rescaling weights by a
    // constant leaves the loss unchanged, so weights (0.25, 0.75) with
    // k = 0.9 give certainty C = (w - 0.1) / 0.9.
    const double k = 0.9;
    const double c0 = (0.25 - (1.0 - k)) / k;  // weight 0.25
    const double c1 = (0.75 - (1.0 - k)) / k;  // weight 0.75
    BeliefGrid target(spec);
    BeliefGrid pred(spec);
    target.at({0, 0}) = {c0, 0.0};
    target.at({1, 0}) = {c1, 0.0};
    pred.at({0, 0}) = {c0 - 0.2, 0.0};  // cell loss 0.2
    pred.at({1, 0}) = {c1 - 0.6, 0.0};  // cell loss 0.6
    LossOptions options;
    options.certainty_k = k;
    CHECK(close(aggregate_loss(pred, target, options), 0.5));
  }

  SUBCASE("perfect prediction scores zero") {
    std::mt19937 rng(3);
    const BeliefGrid target = random_grid(rng, tiny_spec(8, 8));
    CHECK(aggregate_loss(target, target, {}) == 0.0);
  }

  SUBCASE("geometry mismatch is rejected") {
    BeliefGrid a(tiny_spec(2, 2));
    BeliefGrid b(tiny_spec(3, 2));
    CHECK_THROWS_AS(aggregate_loss(a, b, {}), std::invalid_argument);
  }

  SUBCASE("zero weight sum is rejected") {
    BeliefGrid target(spec);  // fully uncertain -> C = 0
    BeliefGrid pred(spec);
    LossOptions options;
    options.certainty_k = 1.0;  // w = C = 0 everywhere
    CHECK_THROWS_AS(aggregate_loss(pred, target, options),
                    std::invalid_argument);
  }
}

TEST_CASE("certainty-weighted loss with k = 0 equals the unweighted mean") {
  std::mt19937 rng(5);
  const GridSpec2D spec = tiny_spec(16, 16);
  const BeliefGrid target = random_grid(rng, spec);
  const BeliefGrid pred = random_grid(rng, spec);
  LossOptions weighted;
  weighted.certainty_k = 0.0;
  CHECK(aggregate_loss(pred, target, weighted) ==
        aggregate_loss(pred, target, {}));
}

TEST_CASE("false occupied and false free") {
  const GridSpec2D spec = tiny_spec(1, 1);
  BeliefGrid pred(spec);
  BeliefGrid target(spec);

  SUBCASE("maximal contradiction") {
    pred.at({0, 0}) = {1.0, 0.0};
    target.at({0, 0}) = {0.0, 1.0};
    CHECK(close(false_occupied(pred, target), 1.0));
    CHECK(close(false_free(pred, target), 0.0));
  }

  SUBCASE("partial contradiction") {
    pred.at({0, 0}) = {0.0, 0.5};
    target.at({0, 0}) = {0.8, 0.0};
    CHECK(close(false_free(pred, target), 0.3));
    CHECK(close(false_occupied(pred, target), 0.0));
  }

  SUBCASE("uncertainty induces no error") {
    CHECK(false_occupied(pred, target) == 0.0);
    CHECK(false_free(pred, target) == 0.0);
  }
}

TEST_CASE("false metrics swap under channel swap") {
  std::mt19937 rng(7);
  const GridSpec2D spec = tiny_spec(12, 12);
  const BeliefGrid pred = random_grid(rng, spec);
  const BeliefGrid target = random_grid(rng, spec);

  BeliefGrid pred_swapped(spec);
  BeliefGrid target_swapped(spec);
  for (std::size_t i = 0; i < pred.cells().size(); ++i) {
    pred_swapped.cells()[i] = {pred.cells()[i].free, pred.cells()[i].occupied};
    target_swapped.cells()[i] = {target.cells()[i].free,
                                 target.cells()[i].occupied};
  }
  CHECK(close(false_occupied(pred, target),
              false_free(pred_swapped, target_swapped)));
  CHECK(close(false_free(pred, target),
              false_occupied(pred_swapped, target_swapped)));
}

TEST_CASE("relative uncertainty") {
  const GridSpec2D spec = tiny_spec(4, 4);

  SUBCASE("identical grids give one") {
    std::mt19937 rng(11);
    const BeliefGrid target = random_grid(rng, spec);
    CHECK(close(relative_uncertainty(target, target), 1.0));
  }

  SUBCASE("uniform ratio") {
    BeliefGrid pred(spec);
    BeliefGrid target(spec);
    for (BeliefCell& c : pred.cells()) c = {0.25, 0.25};    // U_hat = 0.5
    for (BeliefCell& c : target.cells()) c = {0.5, 0.3};    // U = 0.2
    CHECK(close(relative_uncertainty(pred, target), 2.5));
  }

  SUBCASE("fully determinate prediction") {
    BeliefGrid pred(spec);
    BeliefGrid target(spec);
    for (BeliefCell& c : pred.cells()) c = {1.0, 0.0};
    CHECK(relative_uncertainty(pred, target) == 0.0);
  }

  SUBCASE("vanishing target uncertainty is an error") {
    BeliefGrid pred(spec);
    BeliefGrid target(spec);
    for (BeliefCell& c : target.cells()) c = {1.0, 0.0};
    CHECK_THROWS_AS(relative_uncertainty(pred, target), std::domain_error);
  }
}

TEST_CASE("l2 never exceeds l1 for unit-bounded residuals") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const CellResiduals r{u(rng), u(rng)};
    CHECK(cell_l2(r) <= cell_l1(r) + 1e-15);
  }
}

TEST_CASE("full report on identical grids") {
  std::mt19937 rng(17);
  const BeliefGrid target = random_grid(rng, tiny_spec(10, 10));
  const MetricReport report = evaluate_grids(target, target);
  CHECK(report.l1 == 0.0);
  CHECK(report.l2 == 0.0);
  CHECK(report.false_occupied == 0.0);
  CHECK(report.false_free == 0.0);
  CHECK(close(report.rel_unc, 1.0));
  CHECK(report.cells == 100);
}
