#pragma once

#include <cstddef>
#include <vector>

#include "ghg/geometry.hpp"

namespace ghg {

/// Static 3-d tree answering exact nearest-neighbour queries. Ties go to
/// the lower point index.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(PointCloud points);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const PointCloud& points() const { return points_; }
  Hit nearest(const Vec3& q) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in order_
    int axis = -1;                   // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, const Vec3& q, Hit& best) const;

  PointCloud points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Linear-scan reference for KdTree::nearest.
KdTree::Hit nearest_linear(const PointCloud& points, const Vec3& q);

}  // namespace ghg
