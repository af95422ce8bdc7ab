#include "evigrid/gicp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

namespace evigrid {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d whitening(const Eigen::Matrix3d& combined) {
  const Eigen::LLT<Eigen::Matrix3d> llt(combined);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("gicp: combined covariance not positive definite");
  }
  return Eigen::Matrix3d(llt.matrixL())
      .triangularView<Eigen::Lower>()
      .solve(Eigen::Matrix3d::Identity());
}

double evaluate_cost(const std::vector<GicpCorrespondenceTerm>& terms,
                     const std::vector<PoseSE3>& poses) {
  double cost = 0.0;
  for (const GicpCorrespondenceTerm& term : terms) {
    Eigen::Vector3d r;
    evaluate_gicp_residual(term, poses[term.scan_a], poses[term.scan_b], &r,
                           nullptr, nullptr);
    cost += r.squaredNorm();
  }
  return cost;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>>
GicpBatchProblem::correspondence_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < scans.size(); ++i) pairs.emplace_back(i, i + 1);
  if (scans.size() > 2) pairs.emplace_back(0, scans.size() - 1);
  return pairs;
}

void evaluate_gicp_residual(const GicpCorrespondenceTerm& term,
                            const PoseSE3& pose_a, const PoseSE3& pose_b,
                            Eigen::Vector3d* residual,
                            Eigen::Matrix<double, 3, 6>* jac_a,
                            Eigen::Matrix<double, 3, 6>* jac_b) {
  const Eigen::Vector3d pa = pose_a.rotation * term.p;
  const Eigen::Vector3d qb = pose_b.rotation * term.q;
  const Eigen::Vector3d d =
      (pa + pose_a.translation) - (qb + pose_b.translation);
  if (residual != nullptr) *residual = term.sqrt_info * d;
  if (jac_a != nullptr) {
    jac_a->leftCols<3>() = term.sqrt_info;
    jac_a->rightCols<3>() = term.sqrt_info * (-skew(pa));
  }
  if (jac_b != nullptr) {
    jac_b->leftCols<3>() = -term.sqrt_info;
    jac_b->rightCols<3>() = term.sqrt_info * skew(qb);
  }
}

std::vector<GicpCorrespondenceTerm> build_gicp_terms(
    const std::vector<PointCloud>& scans,
    const std::vector<std::vector<PointCovariance>>& covariances,
    const std::vector<NeighborIndex>& local_indexes,
    const std::vector<PoseSE3>& poses,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double max_distance) {
  std::vector<GicpCorrespondenceTerm> terms;
  for (const auto& [ia, ib] : pairs) {
    // T_b^-1 T_a maps a-points into b's local frame; rigid maps preserve the
    // gate distance, so the local k-d tree serves the reference-frame search.
    const PoseSE3 rel = compose(inverse(poses[ib]), poses[ia]);
    const Eigen::Matrix3d ra = poses[ia].rotation.toRotationMatrix();
    const Eigen::Matrix3d rb = poses[ib].rotation.toRotationMatrix();
    const auto& cloud_a = scans[ia].points;
    NeighborIndex::Neighbor nb{};
    for (std::size_t ip = 0; ip < cloud_a.size(); ++ip) {
      const Eigen::Vector3d p = cloud_a[ip].position();
      if (!local_indexes[ib].nearest_within(rel.apply(p), max_distance, &nb)) {
        continue;
      }
      GicpCorrespondenceTerm term;
      term.scan_a = ia;
      term.point_a = ip;
      term.scan_b = ib;
      term.point_b = nb.index;
      term.p = p;
      term.q = local_indexes[ib].point(nb.index);
      const Eigen::Matrix3d combined =
          ra * covariances[ia][ip].matrix * ra.transpose() +
          rb * covariances[ib][nb.index].matrix * rb.transpose();
      term.sqrt_info = whitening(combined);
      terms.push_back(term);
    }
  }
  return terms;
}

PairResidualSummary gicp_align_pair_residuals(
    const PointCloud& cloud_a, const std::vector<PointCovariance>& cov_a,
    const PointCloud& cloud_b, const std::vector<PointCovariance>& cov_b,
    const PoseSE3& transform, double max_distance) {
  if (cloud_a.size() != cov_a.size() || cloud_b.size() != cov_b.size()) {
    throw std::invalid_argument(
        "gicp_align_pair_residuals: covariance count mismatch");
  }
  const NeighborIndex index_b(cloud_b.points);
  const Eigen::Matrix3d r = transform.rotation.toRotationMatrix();

  PairResidualSummary summary;
  NeighborIndex::Neighbor nb{};
  for (std::size_t i = 0; i < cloud_a.size(); ++i) {
    const Eigen::Vector3d moved = transform.apply(cloud_a.points[i].position());
    if (!index_b.nearest_within(moved, max_distance, &nb)) continue;
    const Eigen::Vector3d d = moved - index_b.point(nb.index);
    const Eigen::Matrix3d combined =
        cov_b[nb.index].matrix + r * cov_a[i].matrix * r.transpose();
    const Eigen::Vector3d whitened = whitening(combined) * d;
    summary.gicp_cost += whitened.squaredNorm();
    summary.point_to_point_cost += d.squaredNorm();
    ++summary.correspondences;
  }
  if (summary.correspondences == 0) {
    throw std::runtime_error(
        "gicp_align_pair_residuals: no correspondences within gate");
  }
  return summary;
}

BatchRegistrationResult register_batch(const GicpBatchProblem& problem) {
  const std::size_t count = problem.scans.size();
  if (count < 2) {
    throw std::invalid_argument("register_batch: needs at least 2 scans");
  }
  if (problem.initial_poses.size() != count) {
    throw std::invalid_argument("register_batch: pose count mismatch");
  }
  const GicpOptions& opt = problem.options;

  std::vector<std::vector<PointCovariance>> covariances(count);
  std::vector<NeighborIndex> local_indexes;
  local_indexes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    covariances[i] = estimate_covariances(problem.scans[i], opt.covariance_k,
                                          opt.covariance_epsilon);
    local_indexes.emplace_back(problem.scans[i].points);
  }
  const auto pairs = problem.correspondence_pairs();

  BatchRegistrationResult result;
  result.poses = problem.initial_poses;
  const std::size_t dof = 6 * (count - 1);
  double lambda = opt.lm_initial_lambda;

  for (int outer = 0; outer < opt.max_outer_iterations; ++outer) {
    result.outer_iterations = outer + 1;
    const auto terms =
        build_gicp_terms(problem.scans, covariances, local_indexes,
                         result.poses, pairs, opt.max_correspondence_distance);
    if (terms.empty()) {
      throw std::runtime_error("register_batch: no correspondences within "
                               "gate, scans may be disjoint");
    }
    result.correspondence_count = terms.size();

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dof, dof);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dof);
    double cost = 0.0;
    Eigen::Vector3d r;
    Eigen::Matrix<double, 3, 6> ja, jb;
    for (const GicpCorrespondenceTerm& term : terms) {
      evaluate_gicp_residual(term, result.poses[term.scan_a],
                             result.poses[term.scan_b], &r, &ja, &jb);
      cost += r.squaredNorm();
      const bool a_free = term.scan_a > 0;
      const bool b_free = term.scan_b > 0;
      const std::size_t ca = a_free ? 6 * (term.scan_a - 1) : 0;
      const std::size_t cb = b_free ? 6 * (term.scan_b - 1) : 0;
      if (a_free) {
        h.block<6, 6>(ca, ca) += ja.transpose() * ja;
        g.segment<6>(ca) += ja.transpose() * r;
      }
      if (b_free) {
        h.block<6, 6>(cb, cb) += jb.transpose() * jb;
        g.segment<6>(cb) += jb.transpose() * r;
      }
      if (a_free && b_free) {
        const Eigen::Matrix<double, 6, 6> cross = ja.transpose() * jb;
        h.block<6, 6>(ca, cb) += cross;
        h.block<6, 6>(cb, ca) += cross.transpose();
      }
    }
    result.final_cost = cost;

    bool accepted = false;
    Eigen::VectorXd step;
    std::vector<PoseSE3> candidate;
    double new_cost = cost;
    for (int attempt = 0; attempt < opt.max_lm_attempts; ++attempt) {
      Eigen::MatrixXd damped = h;
      damped.diagonal().array() += lambda;
      step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        throw std::runtime_error("register_batch: singular normal equations");
      }
      candidate = result.poses;
      for (std::size_t i = 1; i < count; ++i) {
        candidate[i] = apply_increment(result.poses[i], step.segment<6>(6 * (i - 1)));
      }
      new_cost = evaluate_cost(terms, candidate);
      if (new_cost < cost) {
        accepted = true;
        lambda = std::max(lambda / 10.0, 1e-12);
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No damping level reduced the frozen cost: stationary point.
      result.converged = true;
      break;
    }
    result.poses = candidate;
    result.final_cost = new_cost;
    result.accepted_steps.push_back({cost, new_cost});

    if (std::abs(cost - new_cost) <=
        opt.relative_cost_tolerance * std::max(cost, 1e-300)) {
      result.converged = true;
      break;
    }
    if (step.norm() < opt.step_norm_tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace evigrid
