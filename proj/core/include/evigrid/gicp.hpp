#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "evigrid/covariance.hpp"
#include "evigrid/kdtree.hpp"
#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid {

struct GicpOptions {
  double max_correspondence_distance = 1.0;  // meters, constant over iterations
  int max_outer_iterations = 50;
  double relative_cost_tolerance = 1e-8;
  double step_norm_tolerance = 1e-10;
  double lm_initial_lambda = 1e-4;  // x10 on reject, /10 on accept
  int max_lm_attempts = 8;
  std::size_t covariance_k = 10;
  double covariance_epsilon = 1e-3;
};

// Batched registration problem: the first scan is the fixed reference and
// correspondences run between adjacent scans plus first-to-last.
struct GicpBatchProblem {
  std::vector<PointCloud> scans;
  std::vector<PoseSE3> initial_poses;  // pose 0 is held exactly fixed
  GicpOptions options;

  // Adjacency pairs plus the closing pair, deduplicated for two-scan batches.
  std::vector<std::pair<std::size_t, std::size_t>> correspondence_pairs() const;
};

// One correspondence with whitening frozen at the linearization poses:
// residual r = sqrt_info * (T_a(p) - T_b(q)) with
// Sigma = R_a C_p R_a^T + R_b C_q R_b^T and sqrt_info = chol(Sigma)^-1.
struct GicpCorrespondenceTerm {
  std::size_t scan_a = 0;
  std::size_t point_a = 0;
  std::size_t scan_b = 0;
  std::size_t point_b = 0;
  Eigen::Vector3d p;  // scan-local position in a
  Eigen::Vector3d q;  // scan-local position in b
  Eigen::Matrix3d sqrt_info;
};

// Analytic residual and Jacobians with respect to the local increments of
// pose a and pose b (see apply_increment in pose.hpp). Jacobian pointers may
// be null.
void evaluate_gicp_residual(const GicpCorrespondenceTerm& term,
                            const PoseSE3& pose_a, const PoseSE3& pose_b,
                            Eigen::Vector3d* residual,
                            Eigen::Matrix<double, 3, 6>* jac_a,
                            Eigen::Matrix<double, 3, 6>* jac_b);

// Correspondence search in the reference frame (queries are mapped into each
// target scan's local frame, which preserves distances) plus whitening at the
// given poses.
std::vector<GicpCorrespondenceTerm> build_gicp_terms(
    const std::vector<PointCloud>& scans,
    const std::vector<std::vector<PointCovariance>>& covariances,
    const std::vector<NeighborIndex>& local_indexes,
    const std::vector<PoseSE3>& poses,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double max_distance);

struct PairResidualSummary {
  double gicp_cost = 0.0;            // sum of squared whitened residuals
  double point_to_point_cost = 0.0;  // same correspondences, identity weights
  std::size_t correspondences = 0;
};

// Residuals of aligning cloud a onto cloud b under the given transform, with
// b as the fixed reference. Throws std::runtime_error when no correspondence
// passes the distance gate.
PairResidualSummary gicp_align_pair_residuals(
    const PointCloud& cloud_a, const std::vector<PointCovariance>& cov_a,
    const PointCloud& cloud_b, const std::vector<PointCovariance>& cov_b,
    const PoseSE3& transform, double max_distance = 1.0);

struct GicpStepRecord {
  double cost_before = 0.0;
  double cost_after = 0.0;
};

struct BatchRegistrationResult {
  std::vector<PoseSE3> poses;
  bool converged = false;
  int outer_iterations = 0;
  double final_cost = 0.0;
  std::size_t correspondence_count = 0;
  std::vector<GicpStepRecord> accepted_steps;
};

// Levenberg-Marquardt over all non-reference poses; correspondences and
// whitening are re-established once per outer iteration. Never silent about
// non-convergence: the flag and diagnostics are part of the result.
BatchRegistrationResult register_batch(const GicpBatchProblem& problem);

}  // namespace evigrid
