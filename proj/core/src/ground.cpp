#include "evigrid/ground.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace evigrid {

namespace {

struct WeightedPlane {
  Eigen::Vector3d normal;
  double d;
};

// Exact minimizer of sum w_i (n.p_i + d)^2 subject to |n| = 1: the smallest
// eigenvector of the weighted scatter about the weighted centroid.
WeightedPlane weighted_plane_fit(const std::vector<Point3>& points,
                                 const std::vector<double>& weights) {
  double wsum = 0.0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    centroid += weights[i] * points[i].position();
    wsum += weights[i];
  }
  centroid /= wsum;

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d d = points[i].position() - centroid;
    scatter += weights[i] * (d * d.transpose());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  solver.computeDirect(scatter);
  const Eigen::Vector3d evals = solver.eigenvalues();
  if (!(evals[1] > 1e-12 * std::max(evals[2], 1e-30))) {
    throw std::invalid_argument("fit_plane: degenerate point set");
  }
  const Eigen::Vector3d n = solver.eigenvectors().col(0);
  return {n, -n.dot(centroid)};
}

void canonicalize(Eigen::Vector3d* n, double* d) {
  double sign = 1.0;
  if (std::abs(n->z()) > 1e-12) {
    sign = n->z() > 0.0 ? 1.0 : -1.0;
  } else if (std::abs(n->x()) > 1e-12) {
    sign = n->x() > 0.0 ? 1.0 : -1.0;
  } else {
    sign = n->y() > 0.0 ? 1.0 : -1.0;
  }
  *n *= sign;
  *d *= sign;
}

double cauchy_cost(const std::vector<Point3>& points,
                   const Eigen::Vector3d& n, double d, double scale) {
  const double c2 = scale * scale;
  double cost = 0.0;
  for (const Point3& p : points) {
    const double r = n.dot(p.position()) + d;
    cost += c2 * std::log1p(r * r / c2);
  }
  return cost;
}

}  // namespace

PlaneParams fit_plane(const std::vector<Point3>& points,
                      const PlaneFitOptions& options,
                      PlaneFitDiagnostics* diagnostics) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_plane: needs at least 3 points");
  }

  // Seed: least-squares plane of the lowest slice by z. The Cauchy loss is
  // non-convex, so the start has to sit in the ground basin.
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t seed_count = std::max<std::size_t>(
      3, static_cast<std::size_t>(
             std::ceil(options.init_lowest_fraction * points.size())));
  std::nth_element(idx.begin(), idx.begin() + (seed_count - 1), idx.end(),
                   [&](std::size_t a, std::size_t b) {
                     return points[a].z < points[b].z ||
                            (points[a].z == points[b].z && a < b);
                   });

  std::vector<Point3> seed_points;
  seed_points.reserve(seed_count);
  for (std::size_t i = 0; i < seed_count; ++i) seed_points.push_back(points[idx[i]]);
  std::vector<double> seed_weights(seed_count, 1.0);
  WeightedPlane plane = weighted_plane_fit(seed_points, seed_weights);
  canonicalize(&plane.normal, &plane.d);

  const double c2 = options.cauchy_scale * options.cauchy_scale;
  std::vector<double> weights(points.size());
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double r = plane.normal.dot(points[i].position()) + plane.d;
      weights[i] = 1.0 / (1.0 + r * r / c2);
    }
    WeightedPlane next = weighted_plane_fit(points, weights);
    canonicalize(&next.normal, &next.d);

    const double step = (next.normal - plane.normal).norm() +
                        std::abs(next.d - plane.d);
    plane = next;
    if (diagnostics != nullptr) {
      diagnostics->iteration_costs.push_back(
          cauchy_cost(points, plane.normal, plane.d, options.cauchy_scale));
    }
    if (step < options.parameter_tolerance) {
      converged = true;
      ++iter;
      break;
    }
  }

  if (diagnostics != nullptr) {
    diagnostics->iterations = iter;
    diagnostics->converged = converged;
  }
  if (!converged) {
    throw std::runtime_error("fit_plane: IRLS did not converge");
  }

  PlaneParams out;
  out.normal = plane.normal;
  out.d = plane.d;
  return out;
}

PlaneParams transform_plane(const PlaneParams& plane, const PoseSE3& pose) {
  PlaneParams out;
  out.normal = pose.rotation * plane.normal;
  out.d = plane.d - out.normal.dot(pose.translation);
  canonicalize(&out.normal, &out.d);
  return out;
}

GroundSegmentation segment_points(const PointCloud& cloud,
                                  const PlaneParams& plane,
                                  double ground_band,
                                  double multipath_cutoff) {
  GroundSegmentation seg;
  for (PointCloud* part : {&seg.ground, &seg.non_ground, &seg.discarded}) {
    part->sensor_origin = cloud.sensor_origin;
    part->timestamp = cloud.timestamp;
    part->scan_id = cloud.scan_id;
  }
  for (const Point3& p : cloud.points) {
    const double h = plane.height(p.position());
    if (h < multipath_cutoff) {
      seg.discarded.points.push_back(p);
    } else if (h <= ground_band) {
      seg.ground.points.push_back(p);
    } else {
      seg.non_ground.points.push_back(p);
    }
  }
  return seg;
}

}  // namespace evigrid
