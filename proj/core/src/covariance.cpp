#include "evigrid/covariance.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "evigrid/kdtree.hpp"

namespace evigrid {

std::vector<PointCovariance> estimate_covariances(const PointCloud& cloud,
                                                  std::size_t k,
                                                  double epsilon) {
  if (cloud.size() < k) {
    throw std::invalid_argument("estimate_covariances: fewer points than k");
  }
  if (k < 3) {
    throw std::invalid_argument("estimate_covariances: k must be >= 3");
  }

  NeighborIndex index(cloud.points);
  std::vector<PointCovariance> out(cloud.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto neighbors = index.knn(cloud.points[i].position(), k);

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& nb : neighbors) mean += index.point(nb.index);
    mean /= static_cast<double>(neighbors.size());

    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto& nb : neighbors) {
      const Eigen::Vector3d d = index.point(nb.index) - mean;
      scatter += d * d.transpose();
    }

    // The iterative solver keeps the basis orthogonal to machine precision,
    // which the spectrum replacement below relies on.
    solver.compute(scatter);
    const Eigen::Matrix3d& basis = solver.eigenvectors();  // ascending order
    const Eigen::Vector3d spectrum(epsilon, 1.0, 1.0);
    Eigen::Matrix3d cov = basis * spectrum.asDiagonal() * basis.transpose();
    out[i].matrix = 0.5 * (cov + cov.transpose());
    out[i].normal = basis.col(0);
  }
  return out;
}

}  // namespace evigrid
