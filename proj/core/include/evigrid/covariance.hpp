#pragma once

#include <vector>

#include <Eigen/Core>

#include "evigrid/types.hpp"

namespace evigrid {

// Local surface covariance of a point, regularized for plane-to-plane
// matching: the eigenvalue spectrum is replaced by (epsilon, 1, 1) with
// epsilon along the local surface normal.
struct PointCovariance {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();

  Eigen::Vector3d normal;  // unit eigenvector of the smallest eigenvalue
};

std::vector<PointCovariance> estimate_covariances(const PointCloud& cloud,
                                                  std::size_t k = 10,
                                                  double epsilon = 1e-3);

}  // namespace evigrid
