#pragma once

#include <vector>

#include <Eigen/Core>

#include "evigrid/pose.hpp"
#include "evigrid/types.hpp"

namespace evigrid {

// Plane in Hesse-like form n . p + d = 0 with |n| = 1, oriented so n.z > 0
// whenever the plane is not vertical.
struct PlaneParams {
  Eigen::Vector3d normal{0.0, 0.0, 1.0};
  double d = 0.0;

  // Signed height of p above the plane.
  double height(const Eigen::Vector3d& p) const { return normal.dot(p) + d; }
};

struct PlaneFitOptions {
  double cauchy_scale = 0.05;      // meters
  int max_iterations = 200;
  double parameter_tolerance = 1e-10;
  double init_lowest_fraction = 0.3;  // seed fit on the lowest points by z
};

struct PlaneFitDiagnostics {
  std::vector<double> iteration_costs;  // robust cost after each reweight
  int iterations = 0;
  bool converged = false;
};

// Robust plane fit: iteratively reweighted least squares under a Cauchy loss
// on squared point-to-plane distances, seeded from the least-squares plane of
// the lowest slice of points by z. Throws std::invalid_argument on degenerate
// input and std::runtime_error on non-convergence.
PlaneParams fit_plane(const std::vector<Point3>& points,
                      const PlaneFitOptions& options = {},
                      PlaneFitDiagnostics* diagnostics = nullptr);

PlaneParams transform_plane(const PlaneParams& plane, const PoseSE3& pose);

struct GroundSegmentation {
  PointCloud ground;
  PointCloud non_ground;
  PointCloud discarded;  // multipath suspects far below the plane
};

// Partition by signed height h: h < multipath_cutoff -> discarded,
// h <= ground_band -> ground, otherwise non_ground. Point order is preserved
// within each subset.
GroundSegmentation segment_points(const PointCloud& cloud,
                                  const PlaneParams& plane,
                                  double ground_band = 0.2,
                                  double multipath_cutoff = -0.2);

}  // namespace evigrid
