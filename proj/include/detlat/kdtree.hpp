#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "detlat/geometry.hpp"

namespace detlat {

struct QueryStats {
  std::size_t nodes_visited = 0;
};

// Exact nearest-neighbor index: median split along the widest-spread axis,
// leaf size 16. Comparisons stay in squared space; the square root is applied
// only at the return boundary.
class PointIndex {
 public:
  explicit PointIndex(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("PointIndex: empty point set");
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = std::uint32_t(i);
    root_ = build(0, order_.size());
  }

  std::size_t size() const { return points_.size(); }

  double nearest_distance(const Vec3& q) const {
    QueryStats ignored;
    return nearest_distance(q, ignored);
  }

  double nearest_distance(const Vec3& q, QueryStats& stats) const {
    double best = std::numeric_limits<double>::infinity();
    search(root_, q, best, stats);
    return std::sqrt(best);
  }

  // Distance to the second-closest stored point (used when the query point
  // itself is a member of the set and its own zero distance must be skipped).
  double second_nearest_distance(const Vec3& q) const {
    double best1 = std::numeric_limits<double>::infinity();
    double best2 = std::numeric_limits<double>::infinity();
    QueryStats ignored;
    search2(root_, q, best1, best2, ignored);
    return std::sqrt(best2);
  }

 private:
  static constexpr std::size_t kLeafSize = 16;

  struct Node {
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
    std::size_t begin = 0, end = 0;  // leaf range into order_
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::size_t begin, std::size_t end) {
    Node n;
    if (end - begin <= kLeafSize) {
      n.begin = begin;
      n.end = end;
      nodes_.push_back(n);
      return std::int32_t(nodes_.size() - 1);
    }
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-lo.x, -lo.y, -lo.z};
    for (std::size_t t = begin; t < end; ++t) {
      const Vec3& p = points_[order_[t]];
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    int axis = 0;
    double spread = hi[0] - lo[0];
    for (int a = 1; a < 3; ++a)
      if (hi[a] - lo[a] > spread) {
        spread = hi[a] - lo[a];
        axis = a;
      }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    n.axis = axis;
    n.split = points_[order_[mid]][axis];
    const std::int32_t self = std::int32_t(nodes_.size());
    nodes_.push_back(n);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  void search(std::int32_t ni, const Vec3& q, double& best, QueryStats& stats) const {
    const Node& n = nodes_[ni];
    ++stats.nodes_visited;
    if (n.axis < 0) {
      for (std::size_t t = n.begin; t < n.end; ++t)
        best = std::min(best, dist_sq(points_[order_[t]], q));
      return;
    }
    const double delta = q[n.axis] - n.split;
    const std::int32_t near = delta < 0.0 ? n.left : n.right;
    const std::int32_t far = delta < 0.0 ? n.right : n.left;
    search(near, q, best, stats);
    if (delta * delta <= best) search(far, q, best, stats);
  }

  void search2(std::int32_t ni, const Vec3& q, double& best1, double& best2,
               QueryStats& stats) const {
    const Node& n = nodes_[ni];
    ++stats.nodes_visited;
    if (n.axis < 0) {
      for (std::size_t t = n.begin; t < n.end; ++t) {
        const double d = dist_sq(points_[order_[t]], q);
        if (d < best1) {
          best2 = best1;
          best1 = d;
        } else if (d < best2) {
          best2 = d;
        }
      }
      return;
    }
    const double delta = q[n.axis] - n.split;
    const std::int32_t near = delta < 0.0 ? n.left : n.right;
    const std::int32_t far = delta < 0.0 ? n.right : n.left;
    search2(near, q, best1, best2, stats);
    if (delta * delta <= best2) search2(far, q, best1, best2, stats);
  }

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace detlat
