#ifndef RPCC_ROI_HPP
#define RPCC_ROI_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rpcc/boxes.hpp"
#include "rpcc/geometry.hpp"
#include "rpcc/gmm.hpp"
#include "rpcc/ground.hpp"
#include "rpcc/heatmap.hpp"
#include "rpcc/kdtree.hpp"

namespace rpcc {

// Elementwise AND of the heatmap mask and the foreground mask.
inline RoiMask compose_roi(const RoiMask& mask_y, const RoiMask& mask_f) {
  if (mask_y.size() != mask_f.size())
    throw std::invalid_argument("compose_roi: mask length mismatch");
  RoiMask out(mask_y.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask_y[i] & mask_f[i];
  return out;
}

// Carries the source frame's RoI points into the target frame via the two
// ego poses; a target point is RoI iff it lies within `radius` of any
// transformed source RoI point.
inline RoiMask propagate_mask(const RoiMask& mask, const PointCloud& source_cloud,
                              const Pose& source_pose, const PointCloud& target_cloud,
                              const Pose& target_pose, double radius = 0.1) {
  if (mask.size() != source_cloud.size())
    throw std::invalid_argument("propagate_mask: mask length mismatch");
  source_pose.validate();
  target_pose.validate();
  RoiMask out(target_cloud.size(), 0);
  std::vector<Vec3> roi_points;
  const Pose to_target = target_pose.inverse().compose(source_pose);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) roi_points.push_back(to_target.apply(source_cloud.points[i]));
  if (roi_points.empty()) return out;
  const SpatialIndex index(roi_points);
  for (std::size_t i = 0; i < target_cloud.size(); ++i) {
    const auto [idx, sq] = index.nearest(target_cloud.points[i]);
    (void)idx;
    if (sq <= radius * radius) out[i] = 1;
  }
  return out;
}

struct RoiParams {
  int k_components = 5;
  double gamma = 0.4;
  GridGeometry grid;
  double confidence_exponent = kConfidenceExponent;
  GroundParams ground;
  double propagation_radius = 0.1;
  int workers = 1;
};

// Full detection pipeline: box membership, per-box GMM fit, x-y projection,
// per-class rasterization, binarization, point lookup, ground suppression.
inline RoiMask roi_from_boxes(const PointCloud& cloud, const std::vector<OrientedBox>& boxes,
                              const RoiParams& params = {}) {
  std::vector<std::pair<Gmm2, int>> projected;
  if (!boxes.empty() && !cloud.empty()) {
    const auto inner = points_in_boxes(cloud, boxes, nullptr, params.workers);
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (inner[j].empty()) continue;
      std::vector<Vec3> pts;
      pts.reserve(inner[j].size());
      for (uint32_t idx : inner[j]) pts.push_back(cloud.points[idx]);
      const Gmm3 g = fit_gmm(pts, params.k_components, 100, 1e-6, box_seed(boxes[j]));
      projected.emplace_back(project_gmm(g), boxes[j].class_id);
    }
  }
  const RoiHeatmap heat =
      rasterize_heatmap(projected, params.grid, 0, params.confidence_exponent);
  const BinaryGrid grid = binarize_heatmap(heat, params.gamma);
  const RoiMask mask_y = mask_from_grid(cloud, grid);
  const RoiMask mask_f = ground_mask(cloud, params.ground);
  return compose_roi(mask_y, mask_f);
}

}  // namespace rpcc

#endif  // RPCC_ROI_HPP
