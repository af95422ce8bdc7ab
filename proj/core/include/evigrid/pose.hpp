#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "evigrid/types.hpp"

namespace evigrid {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Rigid transform mapping scan-frame points into a reference frame.
// The quaternion is renormalized on construction and kept at unit norm.
struct PoseSE3 {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};

  PoseSE3() = default;
  PoseSE3(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

  static PoseSE3 identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

// Applying the result equals applying b first, then a.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 inverse(const PoseSE3& p);

// Maps every point and the sensor origin; intensity and metadata unchanged.
PointCloud transform_cloud(const PointCloud& cloud, const PoseSE3& pose);

// Rotation-vector exponential/logarithm on SO(3).
Eigen::Quaterniond so3_exp(const Eigen::Vector3d& omega);
Eigen::Vector3d so3_log(const Eigen::Quaterniond& q);

// 6-dof chart used by the optimizers: [translation, rotation-log].
Vector6d pose_log6(const PoseSE3& p);

// Local increment delta = [dt, dw]: rotation becomes exp(dw) * R, translation
// becomes t + dt. Matches the Jacobians used in gicp.cpp / pose_graph.cpp.
PoseSE3 apply_increment(const PoseSE3& p, const Vector6d& delta);

double rotation_angle(const PoseSE3& a, const PoseSE3& b);  // radians
double translation_distance(const PoseSE3& a, const PoseSE3& b);

}  // namespace evigrid
