#ifndef RPCC_HEATMAP_HPP
#define RPCC_HEATMAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rpcc/geometry.hpp"
#include "rpcc/gmm.hpp"

namespace rpcc {

// Point-aligned binary mask.
using RoiMask = std::vector<uint8_t>;

struct GridGeometry {
  double origin_x = -50.0;  // min corner, meters
  double origin_y = -50.0;
  double cell_size = 0.5;  // meters per cell
  int width = 200;         // columns (x)
  int height = 200;        // rows (y)

  bool contains(double x, double y) const {
    const double cx = (x - origin_x) / cell_size;
    const double cy = (y - origin_y) / cell_size;
    return cx >= 0.0 && cy >= 0.0 && cx < width && cy < height;
  }
  // Valid only when contains(x, y).
  std::pair<int, int> cell_of(double x, double y) const {
    return {static_cast<int>((y - origin_y) / cell_size),
            static_cast<int>((x - origin_x) / cell_size)};
  }
  Vec2 center_of(int row, int col) const {
    return {origin_x + (col + 0.5) * cell_size, origin_y + (row + 0.5) * cell_size};
  }
  std::size_t cells() const { return static_cast<std::size_t>(width) * height; }
};

// Per-class confidence grids in [0, 1], row-major.
struct RoiHeatmap {
  GridGeometry geom;
  int num_classes = 1;
  std::vector<std::vector<double>> channels;

  double at(int class_id, int row, int col) const {
    return channels[class_id][static_cast<std::size_t>(row) * geom.width + col];
  }
};

struct BinaryGrid {
  GridGeometry geom;
  std::vector<uint8_t> bits;  // row-major

  uint8_t at(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * geom.width + col];
  }
};

// Monotone map from per-object density ratio to confidence; see
// rasterize_heatmap.
constexpr double kConfidenceExponent = 0.25;

// Per class channel, the cell value is the max over that class's objects of
// the object's mixture density at the cell center, normalized by the object's
// own grid peak and compressed by `confidence_exponent` so that the peak cell
// is exactly 1 and the field saturates over the object's support.
inline RoiHeatmap rasterize_heatmap(const std::vector<std::pair<Gmm2, int>>& gmms,
                                    const GridGeometry& geom, int num_classes = 0,
                                    double confidence_exponent = kConfidenceExponent) {
  if (geom.width <= 0 || geom.height <= 0 || geom.cell_size <= 0.0)
    throw std::invalid_argument("rasterize_heatmap: invalid grid geometry");
  for (const auto& [g, class_id] : gmms)
    num_classes = std::max(num_classes, class_id + 1);
  num_classes = std::max(num_classes, 1);

  RoiHeatmap heat;
  heat.geom = geom;
  heat.num_classes = num_classes;
  heat.channels.assign(num_classes, std::vector<double>(geom.cells(), 0.0));

  std::vector<double> field(geom.cells());
  for (const auto& [g, class_id] : gmms) {
    if (g.count() == 0) continue;
    if (class_id < 0) throw std::invalid_argument("rasterize_heatmap: negative class_id");
    double peak = 0.0;
    for (int row = 0; row < geom.height; ++row) {
      for (int col = 0; col < geom.width; ++col) {
        const double d = gmm2_density(g, geom.center_of(row, col));
        field[static_cast<std::size_t>(row) * geom.width + col] = d;
        peak = std::max(peak, d);
      }
    }
    if (peak <= 0.0) continue;  // no grid support, contributes nothing
    auto& channel = heat.channels[class_id];
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double conf = std::pow(field[i] / peak, confidence_exponent);
      channel[i] = std::max(channel[i], conf);
    }
  }
  return heat;
}

// Union across class channels, thresholded at gamma (>= comparison).
inline BinaryGrid binarize_heatmap(const RoiHeatmap& heat, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("binarize_heatmap: gamma must be in (0, 1]");
  BinaryGrid grid;
  grid.geom = heat.geom;
  grid.bits.assign(heat.geom.cells(), 0);
  for (const auto& channel : heat.channels)
    for (std::size_t i = 0; i < channel.size(); ++i)
      if (channel[i] >= gamma) grid.bits[i] = 1;
  return grid;
}

// Point gets bit 1 iff its (x, y) falls in a 1-cell; outside the grid -> 0.
inline RoiMask mask_from_grid(const PointCloud& cloud, const BinaryGrid& grid) {
  RoiMask mask(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (!grid.geom.contains(p.x(), p.y())) continue;
    const auto [row, col] = grid.geom.cell_of(p.x(), p.y());
    mask[i] = grid.at(row, col);
  }
  return mask;
}

}  // namespace rpcc

#endif  // RPCC_HEATMAP_HPP
