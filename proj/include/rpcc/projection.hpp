#ifndef RPCC_PROJECTION_HPP
#define RPCC_PROJECTION_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpcc/geometry.hpp"

namespace rpcc {

// Single orthographic projection plane. u/v span the image axes, depth_axis
// is the direction depth is measured along; stored depth value d maps to
// depth_offset + d * depth_scale meters.
struct PlaneConfig {
  Vec3 origin = Vec3(-51.2, -51.2, -5.0);
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  Vec3 depth_axis = Vec3::UnitZ();
  double pixel_pitch = 0.2;      // meters per pixel
  int width = 512;               // pixels, multiple of 16
  int height = 512;
  double depth_scale = 0.0015625;  // meters per depth unit (1.5625 mm)
  double depth_offset = 0.0;       // meters

  void validate() const {
    if (width <= 0 || height <= 0 || width % 16 != 0 || height % 16 != 0)
      throw std::invalid_argument("plane: image dimensions must be positive multiples of 16");
    if (!(pixel_pitch > 0.0) || !(depth_scale > 0.0))
      throw std::invalid_argument("plane: pitch and depth scale must be positive");
    const double tol = 1e-9;
    if (std::abs(u_axis.norm() - 1.0) > tol || std::abs(v_axis.norm() - 1.0) > tol ||
        std::abs(depth_axis.norm() - 1.0) > tol || std::abs(u_axis.dot(v_axis)) > tol ||
        std::abs(u_axis.dot(depth_axis)) > tol || std::abs(v_axis.dot(depth_axis)) > tol)
      throw std::invalid_argument("plane: axes must be orthonormal");
  }

  // Bird's-eye default: x/y image axes, z depth, footprint centered on origin.
  static PlaneConfig birds_eye(int width = 512, int height = 512, double pitch = 0.2,
                               double ground_clearance = 5.0) {
    PlaneConfig plane;
    plane.width = width;
    plane.height = height;
    plane.pixel_pitch = pitch;
    plane.origin = Vec3(-0.5 * width * pitch, -0.5 * height * pitch, -ground_clearance);
    return plane;
  }
};

struct DepthImage {
  int width = 0, height = 0;
  std::vector<uint16_t> depth;     // defined where occupancy = 1
  std::vector<uint8_t> occupancy;  // 0/1 per pixel, row-major
  PlaneConfig plane;

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
};

// Fixed 16x16 macroblock tiling.
inline int macroblock_of_pixel(int64_t pixel, int image_width) {
  const int mb_cols = image_width / 16;
  const int row = static_cast<int>(pixel / image_width);
  const int col = static_cast<int>(pixel % image_width);
  return (row / 16) * mb_cols + col / 16;
}

struct ProjectionMaps {
  // Per source point: target pixel index under the projection (before the
  // nearest-wins resolution), or -1 when outside the image footprint.
  std::vector<int64_t> point_to_pixel;
  // Points absent from the image: occluded losers plus out-of-footprint.
  std::vector<uint32_t> dropped;
  int image_width = 0;
  int image_height = 0;

  int macroblock_count() const { return (image_width / 16) * (image_height / 16); }
};

struct ProjectionResult {
  DepthImage image;
  ProjectionMaps maps;
};

// Orthographic projection with nearest-wins pixel resolution. Depth is
// quantized to 16 bits via the plane's scale/offset; out-of-range depths and
// out-of-footprint points are dropped.
inline ProjectionResult project(const PointCloud& cloud, const PlaneConfig& plane) {
  plane.validate();
  if (cloud.empty()) throw std::invalid_argument("project: empty cloud");

  ProjectionResult result;
  DepthImage& img = result.image;
  img.width = plane.width;
  img.height = plane.height;
  img.plane = plane;
  img.depth.assign(img.pixels(), 0);
  img.occupancy.assign(img.pixels(), 0);

  ProjectionMaps& maps = result.maps;
  maps.image_width = plane.width;
  maps.image_height = plane.height;
  maps.point_to_pixel.assign(cloud.size(), -1);

  std::vector<int64_t> winner(img.pixels(), -1);
  std::vector<double> best_depth(img.pixels(), std::numeric_limits<double>::infinity());

  for (uint32_t i = 0; i < cloud.size(); ++i) {
    const Vec3 rel = cloud.points[i] - plane.origin;
    const double u = rel.dot(plane.u_axis);
    const double v = rel.dot(plane.v_axis);
    const double depth_m = rel.dot(plane.depth_axis);
    const int col = static_cast<int>(std::floor(u / plane.pixel_pitch));
    const int row = static_cast<int>(std::floor(v / plane.pixel_pitch));
    const double q = (depth_m - plane.depth_offset) / plane.depth_scale;
    if (col < 0 || row < 0 || col >= plane.width || row >= plane.height || q < 0.0 ||
        q > 65535.0) {
      maps.dropped.push_back(i);
      continue;
    }
    const int64_t pixel = int64_t(row) * plane.width + col;
    maps.point_to_pixel[i] = pixel;
    if (depth_m < best_depth[pixel]) {
      if (winner[pixel] >= 0) maps.dropped.push_back(static_cast<uint32_t>(winner[pixel]));
      best_depth[pixel] = depth_m;
      winner[pixel] = i;
    } else {
      maps.dropped.push_back(i);
    }
  }

  bool any = false;
  for (std::size_t pixel = 0; pixel < img.pixels(); ++pixel) {
    if (winner[pixel] < 0) continue;
    any = true;
    img.occupancy[pixel] = 1;
    const double q = (best_depth[pixel] - plane.depth_offset) / plane.depth_scale;
    img.depth[pixel] = static_cast<uint16_t>(std::llround(q));
  }
  if (!any) throw std::invalid_argument("project: cloud entirely outside the plane footprint");
  return result;
}

// One point per occupied pixel at the pixel center, raster order.
inline PointCloud reconstruct(const DepthImage& img) {
  const PlaneConfig& plane = img.plane;
  PointCloud out;
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      const std::size_t pixel = std::size_t(row) * img.width + col;
      if (!img.occupancy[pixel]) continue;
      const double u = (col + 0.5) * plane.pixel_pitch;
      const double v = (row + 0.5) * plane.pixel_pitch;
      const double depth_m = plane.depth_offset + img.depth[pixel] * plane.depth_scale;
      out.points.push_back(plane.origin + u * plane.u_axis + v * plane.v_axis +
                           depth_m * plane.depth_axis);
    }
  }
  return out;
}

}  // namespace rpcc

#endif  // RPCC_PROJECTION_HPP
