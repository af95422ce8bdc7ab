#include "evigrid/pose.hpp"

#include <cmath>
#include <stdexcept>

namespace evigrid {

PoseSE3::PoseSE3(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
    : rotation(q), translation(t) {
  const double n = rotation.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    throw std::invalid_argument("PoseSE3: degenerate quaternion");
  }
  rotation.coeffs() /= n;
  if (!translation.allFinite()) {
    throw std::invalid_argument("PoseSE3: non-finite translation");
  }
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

PoseSE3 inverse(const PoseSE3& p) {
  const Eigen::Quaterniond qinv = p.rotation.conjugate();
  return {qinv, qinv * (-p.translation)};
}

PointCloud transform_cloud(const PointCloud& cloud, const PoseSE3& pose) {
  PointCloud out;
  out.timestamp = cloud.timestamp;
  out.scan_id = cloud.scan_id;
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) {
    const Eigen::Vector3d q = pose.apply(p.position());
    out.points.emplace_back(q.x(), q.y(), q.z(), p.intensity);
  }
  const Eigen::Vector3d o = pose.apply(cloud.sensor_origin.position());
  out.sensor_origin = Point3(o.x(), o.y(), o.z(), cloud.sensor_origin.intensity);
  return out;
}

Eigen::Quaterniond so3_exp(const Eigen::Vector3d& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) {
    // First-order expansion keeps the map smooth through zero.
    Eigen::Quaterniond q(1.0, 0.5 * omega.x(), 0.5 * omega.y(),
                          0.5 * omega.z());
    q.normalize();
    return q;
  }
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, omega / angle));
}

Eigen::Vector3d so3_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();  // pick the short arc
  const Eigen::Vector3d v = q.vec();
  const double sin_half = v.norm();
  if (sin_half < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(sin_half, q.w());
  return (angle / sin_half) * v;
}

Vector6d pose_log6(const PoseSE3& p) {
  Vector6d out;
  out.head<3>() = p.translation;
  out.tail<3>() = so3_log(p.rotation);
  return out;
}

PoseSE3 apply_increment(const PoseSE3& p, const Vector6d& delta) {
  return {so3_exp(delta.tail<3>()) * p.rotation,
          p.translation + delta.head<3>()};
}

double rotation_angle(const PoseSE3& a, const PoseSE3& b) {
  return so3_log(a.rotation.conjugate() * b.rotation).norm();
}

double translation_distance(const PoseSE3& a, const PoseSE3& b) {
  return (a.translation - b.translation).norm();
}

}  // namespace evigrid
