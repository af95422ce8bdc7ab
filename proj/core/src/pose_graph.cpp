#include "evigrid/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

namespace evigrid {

namespace {

void check_connected(const PoseGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const PoseGraphEdge& e : graph.edges) {
    if (e.from >= n || e.to >= n) {
      throw std::invalid_argument("pose graph: edge references missing node");
    }
    adjacency[e.from].push_back(e.to);
    adjacency[e.to].push_back(e.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const std::size_t w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("pose graph: graph is disconnected");
  }
}

// Central-difference Jacobian of the edge residual with respect to the local
// increment of one endpoint. Exact enough for the normal equations and keeps
// the gradient consistent with the cost by construction.
Eigen::Matrix<double, 6, 6> numeric_jacobian(const PoseGraphEdge& edge,
                                             const PoseSE3& node_i,
                                             const PoseSE3& node_j,
                                             bool wrt_i) {
  constexpr double kStep = 1e-7;
  Eigen::Matrix<double, 6, 6> jac;
  for (int k = 0; k < 6; ++k) {
    Vector6d delta = Vector6d::Zero();
    delta[k] = kStep;
    const PoseSE3 plus_i = wrt_i ? apply_increment(node_i, delta) : node_i;
    const PoseSE3 plus_j = wrt_i ? node_j : apply_increment(node_j, delta);
    delta[k] = -kStep;
    const PoseSE3 minus_i = wrt_i ? apply_increment(node_i, delta) : node_i;
    const PoseSE3 minus_j = wrt_i ? node_j : apply_increment(node_j, delta);
    jac.col(k) = (pose_graph_edge_residual(edge, plus_i, plus_j) -
                  pose_graph_edge_residual(edge, minus_i, minus_j)) /
                 (2.0 * kStep);
  }
  return jac;
}

}  // namespace

Vector6d pose_graph_edge_residual(const PoseGraphEdge& edge,
                                  const PoseSE3& node_i,
                                  const PoseSE3& node_j) {
  const PoseSE3 relative = compose(inverse(node_i), node_j);
  return pose_log6(compose(inverse(edge.observation), relative));
}

double pose_graph_cost(const PoseGraph& graph,
                       const std::vector<PoseSE3>& nodes) {
  double cost = 0.0;
  for (const PoseGraphEdge& e : graph.edges) {
    const Vector6d r = pose_graph_edge_residual(e, nodes[e.from], nodes[e.to]);
    cost += r.dot(e.information * r);
  }
  return cost;
}

void assemble_normal_equations(const PoseGraph& graph,
                               const std::vector<PoseSE3>& nodes,
                               Eigen::MatrixXd* h, Eigen::VectorXd* g) {
  const std::size_t dof = 6 * (graph.nodes.size() - 1);
  h->setZero(dof, dof);
  g->setZero(dof);
  for (const PoseGraphEdge& e : graph.edges) {
    const Vector6d r = pose_graph_edge_residual(e, nodes[e.from], nodes[e.to]);
    const bool i_free = e.from > 0;
    const bool j_free = e.to > 0;
    const std::size_t ci = i_free ? 6 * (e.from - 1) : 0;
    const std::size_t cj = j_free ? 6 * (e.to - 1) : 0;
    Eigen::Matrix<double, 6, 6> ji, jj;
    if (i_free) ji = numeric_jacobian(e, nodes[e.from], nodes[e.to], true);
    if (j_free) jj = numeric_jacobian(e, nodes[e.from], nodes[e.to], false);
    if (i_free) {
      h->block<6, 6>(ci, ci) += ji.transpose() * e.information * ji;
      g->segment<6>(ci) += ji.transpose() * e.information * r;
    }
    if (j_free) {
      h->block<6, 6>(cj, cj) += jj.transpose() * e.information * jj;
      g->segment<6>(cj) += jj.transpose() * e.information * r;
    }
    if (i_free && j_free) {
      const Eigen::Matrix<double, 6, 6> cross =
          ji.transpose() * e.information * jj;
      h->block<6, 6>(ci, cj) += cross;
      h->block<6, 6>(cj, ci) += cross.transpose();
    }
  }
}

PoseGraphResult optimize_pose_graph(const PoseGraph& graph,
                                    const PoseGraphOptions& options) {
  if (graph.nodes.empty()) {
    throw std::invalid_argument("pose graph: no nodes");
  }
  check_connected(graph);

  PoseGraphResult result;
  result.nodes = graph.nodes;
  result.initial_cost = pose_graph_cost(graph, result.nodes);
  result.final_cost = result.initial_cost;
  if (graph.nodes.size() == 1) {
    result.converged = true;
    return result;
  }

  const std::size_t dof = 6 * (graph.nodes.size() - 1);
  Eigen::MatrixXd h(dof, dof);
  Eigen::VectorXd g(dof);
  double lambda = options.lm_initial_lambda;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    assemble_normal_equations(graph, result.nodes, &h, &g);
    if (g.norm() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    const double cost = pose_graph_cost(graph, result.nodes);
    bool accepted = false;
    for (int attempt = 0; attempt < options.max_lm_attempts; ++attempt) {
      Eigen::MatrixXd damped = h;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        throw std::runtime_error("pose graph: singular normal equations");
      }
      std::vector<PoseSE3> candidate = result.nodes;
      for (std::size_t i = 1; i < result.nodes.size(); ++i) {
        candidate[i] =
            apply_increment(result.nodes[i], step.segment<6>(6 * (i - 1)));
      }
      const double new_cost = pose_graph_cost(graph, candidate);
      if (new_cost < cost) {
        result.nodes = std::move(candidate);
        result.final_cost = new_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step.norm() < options.step_norm_tolerance) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // Damping maxed out without descent: gradient is numerically zero.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }
  return result;
}

}  // namespace evigrid
