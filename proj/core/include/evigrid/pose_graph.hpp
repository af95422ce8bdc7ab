#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "evigrid/pose.hpp"

namespace evigrid {

struct PoseGraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  PoseSE3 observation;  // measured relative pose from -> to
  Matrix6d information = Matrix6d::Identity();
};

// Nodes are poses relative to node 0, which stays fixed. Multiple edges
// between the same node pair are allowed.
struct PoseGraph {
  std::vector<PoseSE3> nodes;
  std::vector<PoseGraphEdge> edges;
};

struct PoseGraphOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double step_norm_tolerance = 1e-12;
  double lm_initial_lambda = 1e-4;
  int max_lm_attempts = 10;
};

struct PoseGraphResult {
  std::vector<PoseSE3> nodes;
  bool converged = false;
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

// r = log6(observation^-1 * (node_i^-1 * node_j)).
Vector6d pose_graph_edge_residual(const PoseGraphEdge& edge,
                                  const PoseSE3& node_i, const PoseSE3& node_j);

double pose_graph_cost(const PoseGraph& graph,
                       const std::vector<PoseSE3>& nodes);

// Gauss-Newton normal equations (no damping) at the given node estimates;
// node 0 is excluded from the state. Exposed for diagnostics.
void assemble_normal_equations(const PoseGraph& graph,
                               const std::vector<PoseSE3>& nodes,
                               Eigen::MatrixXd* h, Eigen::VectorXd* g);

// Levenberg-Marquardt over local 6-dof increments; converged when the
// gradient norm falls below the tolerance. Throws std::invalid_argument on a
// disconnected graph and std::runtime_error on singular normal equations.
PoseGraphResult optimize_pose_graph(const PoseGraph& graph,
                                    const PoseGraphOptions& options = {});

}  // namespace evigrid
