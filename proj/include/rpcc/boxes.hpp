#ifndef RPCC_BOXES_HPP
#define RPCC_BOXES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rpcc/geometry.hpp"
#include "rpcc/kdtree.hpp"
#include "rpcc/parallel.hpp"

namespace rpcc {

// Radius of the box's circumscribed sphere.
inline double box_circumradius(const OrientedBox& box) {
  return 0.5 * std::sqrt(box.width * box.width + box.length * box.length + box.height * box.height);
}

// Corner k carries local sign pattern (bit 0 -> x, bit 1 -> y, bit 2 -> z;
// bit set means the positive half-extent), yaw-rotated into the world frame.
// Corner 0 is (-w/2, -l/2, -h/2), corner 7 is (+w/2, +l/2, +h/2).
inline std::array<Vec3, 8> box_corners(const OrientedBox& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  std::array<Vec3, 8> corners;
  for (int k = 0; k < 8; ++k) {
    const double x = (k & 1 ? 0.5 : -0.5) * box.width;
    const double y = (k & 2 ? 0.5 : -0.5) * box.length;
    const double z = (k & 4 ? 0.5 : -0.5) * box.height;
    corners[k] = box.center + Vec3(c * x - s * y, s * x + c * y, z);
  }
  return corners;
}

namespace detail {

// Fixed 6-tetrahedron cover of the box hull, all sharing the 0-7 diagonal.
inline constexpr std::array<std::array<int, 4>, 6> kBoxTetrahedra = {{
    {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}}};

// Barycentric sign test; points on a face count as inside.
inline bool point_in_tetrahedron(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                                 const Vec3& d, double tol = -1e-12) {
  const Vec3 e1 = b - a, e2 = c - a, e3 = d - a, r = p - a;
  const double det = e1.dot(e2.cross(e3));
  if (det == 0.0) return false;
  const double l1 = r.dot(e2.cross(e3)) / det;
  const double l2 = e1.dot(r.cross(e3)) / det;
  const double l3 = e1.dot(e2.cross(r)) / det;
  const double l0 = 1.0 - l1 - l2 - l3;
  return l0 >= tol && l1 >= tol && l2 >= tol && l3 >= tol;
}

inline bool point_in_box_frame(const Vec3& p, const OrientedBox& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const Vec3 r = p - box.center;
  const double lx = c * r.x() + s * r.y();
  const double ly = -s * r.x() + c * r.y();
  return std::abs(lx) <= 0.5 * box.width && std::abs(ly) <= 0.5 * box.length &&
         std::abs(r.z()) <= 0.5 * box.height;
}

}  // namespace detail

// Point indices inside each box: one shared k-d tree, a circumsphere ball
// query per box, then the tetrahedral membership test on the survivors.
inline std::vector<std::vector<uint32_t>> points_in_boxes(const PointCloud& cloud,
                                                          const std::vector<OrientedBox>& boxes,
                                                          const SpatialIndex* prebuilt = nullptr,
                                                          int workers = 1) {
  const SpatialIndex local = prebuilt ? SpatialIndex() : SpatialIndex(cloud);
  const SpatialIndex& index = prebuilt ? *prebuilt : local;
  std::vector<std::vector<uint32_t>> result(boxes.size());
  parallel_for(boxes.size(), workers, [&](std::size_t j) {
    const OrientedBox& box = boxes[j];
    const double r = box_circumradius(box);
    const auto candidates = index.query_ball(box.center, r * (1.0 + 1e-12) + 1e-12);
    const auto corners = box_corners(box);
    std::vector<uint32_t> inside;
    for (uint32_t idx : candidates) {
      const Vec3& p = cloud.points[idx];
      for (const auto& tet : detail::kBoxTetrahedra) {
        if (detail::point_in_tetrahedron(p, corners[tet[0]], corners[tet[1]], corners[tet[2]],
                                         corners[tet[3]])) {
          inside.push_back(idx);
          break;
        }
      }
    }
    result[j] = std::move(inside);
  });
  return result;
}

// Baseline: test every point against every box in the box frame, with the
// per-box rotation hoisted out of the point loop.
inline std::vector<std::vector<uint32_t>> points_in_boxes_bruteforce(
    const PointCloud& cloud, const std::vector<OrientedBox>& boxes) {
  std::vector<std::vector<uint32_t>> result(boxes.size());
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    const OrientedBox& box = boxes[j];
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const double hw = 0.5 * box.width, hl = 0.5 * box.length, hh = 0.5 * box.height;
    std::vector<uint32_t> inside;
    for (uint32_t i = 0; i < cloud.points.size(); ++i) {
      const Vec3 r = cloud.points[i] - box.center;
      if (std::abs(c * r.x() + s * r.y()) <= hw && std::abs(-s * r.x() + c * r.y()) <= hl &&
          std::abs(r.z()) <= hh)
        inside.push_back(i);
    }
    result[j] = std::move(inside);
  }
  return result;
}

}  // namespace rpcc

#endif  // RPCC_BOXES_HPP
