#include "evigrid/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evigrid {

namespace {

constexpr std::uint32_t kLeafSize = 16;

// Candidate ordering: (squared distance, index) lexicographic.
struct Candidate {
  double d2;
  std::uint32_t index;

  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

// Fixed-capacity max-heap keeping the k smallest candidates.
class BoundedHeap {
 public:
  explicit BoundedHeap(std::size_t k) : capacity_(k) { items_.reserve(k); }

  bool full() const { return items_.size() == capacity_; }
  double bound() const {
    return full() ? items_.front().d2 : std::numeric_limits<double>::infinity();
  }

  void offer(const Candidate& c) {
    if (!full()) {
      items_.push_back(c);
      std::push_heap(items_.begin(), items_.end());
    } else if (c < items_.front()) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = c;
      std::push_heap(items_.begin(), items_.end());
    }
  }

  std::vector<Candidate> sorted() && {
    std::sort_heap(items_.begin(), items_.end());
    return std::move(items_);
  }

 private:
  std::size_t capacity_;
  std::vector<Candidate> items_;
};

}  // namespace

NeighborIndex::NeighborIndex(const std::vector<Point3>& points) {
  points_.reserve(points.size());
  for (const Point3& p : points) points_.push_back(p.position());
  if (points_.empty()) {
    throw std::invalid_argument("NeighborIndex: empty point set");
  }
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

NeighborIndex::NeighborIndex(std::vector<Eigen::Vector3d> points)
    : points_(std::move(points)) {
  if (points_.empty()) {
    throw std::invalid_argument("NeighborIndex: empty point set");
  }
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = points_[a][axis];
                     const double vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });

  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  nodes_.push_back(node);
  const auto id = static_cast<std::int32_t>(nodes_.size() - 1);
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <typename Heap>
void NeighborIndex::search(std::int32_t id, const Eigen::Vector3d& q,
                           Heap& heap) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      heap.offer({(points_[idx] - q).squaredNorm(), idx});
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0.0 ? node.left : node.right;
  const std::int32_t far = diff < 0.0 ? node.right : node.left;
  search(near, q, heap);
  // Equality still explores the far side: equal-distance candidates with a
  // smaller index may live there.
  if (diff * diff <= heap.bound()) search(far, q, heap);
}

std::vector<NeighborIndex::Neighbor> NeighborIndex::knn(
    const Eigen::Vector3d& query, std::size_t k) const {
  std::vector<Neighbor> result;
  if (k == 0) return result;
  BoundedHeap heap(std::min(k, points_.size()));
  search(root_, query, heap);
  auto candidates = std::move(heap).sorted();
  result.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    result.push_back({c.index, std::sqrt(c.d2)});
  }
  return result;
}

bool NeighborIndex::nearest_within(const Eigen::Vector3d& query,
                                   double max_distance, Neighbor* out) const {
  BoundedHeap heap(1);
  search(root_, query, heap);
  auto candidates = std::move(heap).sorted();
  if (candidates.empty() || candidates.front().d2 > max_distance * max_distance) {
    return false;
  }
  out->index = candidates.front().index;
  out->distance = std::sqrt(candidates.front().d2);
  return true;
}

}  // namespace evigrid
