#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "evigrid/types.hpp"

namespace evigrid {

// Exact k-nearest-neighbor index over a fixed point set. Distance ties are
// broken by ascending point index so results are reproducible against a
// linear-scan oracle. Immutable after construction; concurrent queries are
// safe.
class NeighborIndex {
 public:
  struct Neighbor {
    std::size_t index;
    double distance;
  };

  explicit NeighborIndex(const std::vector<Point3>& points);
  explicit NeighborIndex(std::vector<Eigen::Vector3d> points);

  // Returns min(k, size()) neighbors sorted by ascending (distance, index).
  std::vector<Neighbor> knn(const Eigen::Vector3d& query, std::size_t k) const;

  // Nearest neighbor within max_distance; returns false if none qualifies.
  bool nearest_within(const Eigen::Vector3d& query, double max_distance,
                      Neighbor* out) const;

  std::size_t size() const { return points_.size(); }
  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }

 private:
  struct Node {
    double split = 0.0;
    std::int32_t axis = -1;      // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;     // leaf range into order_
    std::uint32_t end = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  template <typename Heap>
  void search(std::int32_t node, const Eigen::Vector3d& q, Heap& heap) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace evigrid
