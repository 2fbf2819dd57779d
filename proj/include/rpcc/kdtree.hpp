#ifndef RPCC_KDTREE_HPP
#define RPCC_KDTREE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpcc/geometry.hpp"

namespace rpcc {

// Balanced k-d tree with median split on the widest axis and leaf size 16,
// immutable after construction. The tree structure lives on packed
// single-precision entries for compact builds and traversals; queries stay
// exact because node bounds are padded by the float rounding bound and every
// surviving candidate is re-tested against the original double coordinates.
class SpatialIndex {
 public:
  static constexpr int kLeafSize = 16;

  SpatialIndex() = default;

  explicit SpatialIndex(std::vector<Vec3> points) : points_(std::move(points)) {
    entries_.reserve(points_.size());
    double max_abs = 0.0;
    for (uint32_t i = 0; i < points_.size(); ++i) {
      const Vec3& p = points_[i];
      entries_.push_back({{float(p.x()), float(p.y()), float(p.z())}, i});
      max_abs = std::max({max_abs, std::abs(p.x()), std::abs(p.y()), std::abs(p.z())});
    }
    pad_ = 4.0 * double(std::numeric_limits<float>::epsilon()) * max_abs + 1e-12;
    if (entries_.empty()) return;
    std::array<float, 3> lo = entries_[0].p, hi = entries_[0].p;
    for (const Entry& e : entries_)
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], e.p[a]);
        hi[a] = std::max(hi[a], e.p[a]);
      }
    nodes_.reserve(2 * entries_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<uint32_t>(entries_.size()), lo, hi);
  }

  explicit SpatialIndex(const PointCloud& cloud) : SpatialIndex(cloud.points) {}

  std::size_t size() const { return entries_.size(); }

  // Indices i with ||points[i] - center|| <= radius, ascending.
  std::vector<uint32_t> query_ball(const Vec3& center, double radius) const {
    if (radius < 0.0) throw std::invalid_argument("query_ball: negative radius");
    std::vector<uint32_t> out;
    if (root_ >= 0) {
      const std::array<double, 3> q = {center.x(), center.y(), center.z()};
      search_ball(root_, q, center, radius * radius, out);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Index of the closest point and its squared distance.
  std::pair<uint32_t, double> nearest(const Vec3& query) const {
    if (entries_.empty()) throw std::invalid_argument("nearest: empty index");
    const std::array<double, 3> q = {query.x(), query.y(), query.z()};
    uint32_t best_idx = entries_[0].index;
    double best_sq = std::numeric_limits<double>::infinity();
    search_nearest(root_, q, query, best_idx, best_sq);
    return {best_idx, best_sq};
  }

 private:
  struct Entry {
    std::array<float, 3> p;
    uint32_t index;
  };
  struct Node {
    std::array<float, 3> lo, hi;  // cell bounds (root tight, children split-derived)
    uint32_t begin = 0, end = 0;  // range in entries_
    int32_t left = -1, right = -1;
  };

  int32_t build(uint32_t begin, uint32_t end, std::array<float, 3> lo, std::array<float, 3> hi) {
    const int32_t id = static_cast<int32_t>(nodes_.size());
    nodes_.push_back({lo, hi, begin, end, -1, -1});
    if (end - begin > kLeafSize) {
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
      const uint32_t mid = begin + (end - begin) / 2;
      std::nth_element(entries_.begin() + begin, entries_.begin() + mid, entries_.begin() + end,
                       [axis](const Entry& a, const Entry& b) { return a.p[axis] < b.p[axis]; });
      const float split = entries_[mid].p[axis];
      std::array<float, 3> left_hi = hi, right_lo = lo;
      left_hi[axis] = split;
      right_lo[axis] = split;
      const int32_t left = build(begin, mid, lo, left_hi);
      const int32_t right = build(mid, end, right_lo, hi);
      nodes_[id].left = left;
      nodes_[id].right = right;
    }
    return id;
  }

  // Conservative squared distance from a query to a node cell: per-axis
  // distances are reduced by the float padding, so it never exceeds the true
  // distance to any point stored in the cell.
  double sq_dist_to_box(const std::array<double, 3>& p, const Node& node) const {
    double sq = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d =
          std::max({double(node.lo[a]) - pad_ - p[a], 0.0, p[a] - double(node.hi[a]) - pad_});
      sq += d * d;
    }
    return sq;
  }

  // Conservative upper bound on the distance from a query to anything inside
  // the cell.
  double sq_farthest_in_box(const std::array<double, 3>& p, const Node& node) const {
    double sq = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double d =
          std::max(std::abs(p[a] - double(node.lo[a])), std::abs(p[a] - double(node.hi[a]))) +
          pad_;
      sq += d * d;
    }
    return sq;
  }

  void search_ball(int32_t id, const std::array<double, 3>& q, const Vec3& center,
                   double r_sq, std::vector<uint32_t>& out) const {
    const Node& node = nodes_[id];
    if (sq_dist_to_box(q, node) > r_sq) return;
    if (sq_farthest_in_box(q, node) <= r_sq) {
      for (uint32_t i = node.begin; i < node.end; ++i) out.push_back(entries_[i].index);
      return;
    }
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        const uint32_t idx = entries_[i].index;
        if ((points_[idx] - center).squaredNorm() <= r_sq) out.push_back(idx);
      }
      return;
    }
    search_ball(node.left, q, center, r_sq, out);
    search_ball(node.right, q, center, r_sq, out);
  }

  void search_nearest(int32_t id, const std::array<double, 3>& q, const Vec3& query,
                      uint32_t& best_idx, double& best_sq) const {
    const Node& node = nodes_[id];
    if (sq_dist_to_box(q, node) >= best_sq) return;
    if (node.left < 0) {
      for (uint32_t i = node.begin; i < node.end; ++i) {
        const uint32_t idx = entries_[i].index;
        const double sq = (points_[idx] - query).squaredNorm();
        if (sq < best_sq || (sq == best_sq && idx < best_idx)) {
          best_sq = sq;
          best_idx = idx;
        }
      }
      return;
    }
    const double dl = sq_dist_to_box(q, nodes_[node.left]);
    const double dr = sq_dist_to_box(q, nodes_[node.right]);
    if (dl <= dr) {
      search_nearest(node.left, q, query, best_idx, best_sq);
      search_nearest(node.right, q, query, best_idx, best_sq);
    } else {
      search_nearest(node.right, q, query, best_idx, best_sq);
      search_nearest(node.left, q, query, best_idx, best_sq);
    }
  }

  std::vector<Vec3> points_;
  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
  double pad_ = 0.0;
  int32_t root_ = -1;
};

inline SpatialIndex build_index(const PointCloud& cloud) { return SpatialIndex(cloud); }

}  // namespace rpcc

#endif  // RPCC_KDTREE_HPP
