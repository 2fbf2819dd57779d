// Shows the RoI detection stages on one synthetic frame: per-box GMM fits,
// the rasterized heatmap, binarization, ground suppression, and propagation
// to a second frame.

#include <cstdio>

#include "rpcc/rpcc.hpp"

using namespace rpcc;

int main() {
  SynthParams params;
  params.seed = 3;
  params.frames = 2;
  params.objects = 2;
  params.ground_points = 5000;
  params.points_per_object = 1000;
  params.extent = 25.0;
  params.speed = 1.0;
  const SynthScene scene = generate_scene(params);
  const PointCloud& cloud = scene.frames[0];

  const auto inner = points_in_boxes(cloud, scene.boxes[0]);
  std::vector<std::pair<Gmm2, int>> gmms;
  for (std::size_t j = 0; j < inner.size(); ++j) {
    std::vector<Vec3> pts;
    for (uint32_t idx : inner[j]) pts.push_back(cloud.points[idx]);
    const Gmm3 fit = fit_gmm(pts, 5, 100, 1e-6, box_seed(scene.boxes[0][j]));
    std::printf("box %zu: %zu inner points, %d components\n", j, pts.size(), fit.count());
    gmms.emplace_back(project_gmm(fit), scene.boxes[0][j].class_id);
  }

  const RoiHeatmap heat = rasterize_heatmap(gmms, GridGeometry{});
  const BinaryGrid grid = binarize_heatmap(heat, 0.4);
  std::size_t hot_cells = 0;
  for (uint8_t b : grid.bits) hot_cells += b;
  std::printf("heatmap: %d class channel(s), %zu cells above gamma\n", heat.num_classes,
              hot_cells);

  const RoiMask mask_y = mask_from_grid(cloud, grid);
  const RoiMask mask_f = ground_mask(cloud);
  const RoiMask mask = compose_roi(mask_y, mask_f);
  std::size_t heat_pts = 0, fg_pts = 0, roi_pts = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    heat_pts += mask_y[i];
    fg_pts += mask_f[i];
    roi_pts += mask[i];
  }
  std::printf("masks: heatmap %zu, foreground %zu, final %zu of %zu points\n", heat_pts, fg_pts,
              roi_pts, cloud.size());

  const RoiMask next = propagate_mask(mask, scene.frames[0], scene.frames[0].pose,
                                      scene.frames[1], scene.frames[1].pose, 0.1);
  std::size_t propagated = 0;
  for (uint8_t b : next) propagated += b;
  std::printf("propagated to frame 1: %zu RoI points\n", propagated);
  return 0;
}
