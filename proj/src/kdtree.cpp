#include "ghg/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "ghg/cost.hpp"

namespace ghg {

namespace {

constexpr std::size_t kLeafSize = 8;

bool better(std::size_t i, double d2, const KdTree::Hit& best) {
  return d2 < best.squared_distance || (d2 == best.squared_distance && i < best.index);
}

}  // namespace

KdTree::KdTree(PointCloud points) : points_(std::move(points)) {
  for (const Vec3& p : points_)
    if (!p.allFinite()) throw ContractError("KdTree: non-finite point");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) build(0, points_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node, const Vec3& q, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t k = n.begin; k < n.end; ++k) {
      const std::size_t i = order_[k];
      const double d2 = (points_[i] - q).squaredNorm();
      if (better(i, d2, best)) best = {i, d2};
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[n.axis] - n.split;
  const int near = diff <= 0.0 ? n.left : n.right;
  const int far = diff <= 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff <= best.squared_distance) search(far, q, best);
}

KdTree::Hit KdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw ContractError("KdTree::nearest: empty tree");
  Hit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  search(0, q, best);
  return best;
}

KdTree::Hit nearest_linear(const PointCloud& points, const Vec3& q) {
  if (points.empty()) throw ContractError("nearest_linear: empty cloud");
  KdTree::Hit best{0, (points[0] - q).squaredNorm()};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d2 = (points[i] - q).squaredNorm();
    if (d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

}  // namespace ghg
