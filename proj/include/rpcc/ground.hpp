#ifndef RPCC_GROUND_HPP
#define RPCC_GROUND_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rpcc/geometry.hpp"
#include "rpcc/heatmap.hpp"

namespace rpcc {

struct GroundParams {
  double height_margin = 0.2;   // delta_g, meters
  double seed_quantile = 0.2;   // lowest-z fraction used for the plane fit
  double seed_band = 0.5;       // seeds above sector min z by more than this are discarded
  int sectors = 16;             // azimuthal bins per ring
  std::array<double, 3> ring_edges = {15.0, 30.0, 45.0};  // 4 rings, outer unbounded
};

// Foreground mask: bit 1 for points classified as non-ground. The x-y plane
// is partitioned into concentric-ring sectors; each sector fits a plane
// z = a*x + b*y + c to its lowest-z quantile by least squares and marks
// points within the height margin of that plane as ground.
inline RoiMask ground_mask(const PointCloud& cloud, const GroundParams& params = {}) {
  const std::size_t n = cloud.size();
  RoiMask mask(n, 1);
  if (n == 0) return mask;

  const int rings = static_cast<int>(params.ring_edges.size()) + 1;
  const int bins = rings * params.sectors;
  std::vector<std::vector<uint32_t>> sector_points(bins);
  for (uint32_t i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[i];
    const double r = std::hypot(p.x(), p.y());
    int ring = rings - 1;
    for (int k = 0; k < rings - 1; ++k)
      if (r <= params.ring_edges[k]) { ring = k; break; }
    double az = std::atan2(p.y(), p.x());  // [-pi, pi]
    int sector = static_cast<int>((az + M_PI) / (2.0 * M_PI) * params.sectors);
    sector = std::clamp(sector, 0, params.sectors - 1);
    sector_points[ring * params.sectors + sector].push_back(i);
  }

  for (const auto& idx : sector_points) {
    if (idx.empty()) continue;
    // lowest-z quantile as seed set
    std::vector<uint32_t> seeds(idx);
    const std::size_t count =
        std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(seeds.size() * params.seed_quantile)));
    if (seeds.size() > count) {
      std::nth_element(seeds.begin(), seeds.begin() + count, seeds.end(),
                       [&](uint32_t a, uint32_t b) { return cloud.points[a].z() < cloud.points[b].z(); });
      seeds.resize(count);
    }
    // a dense object can dominate the quantile; keep only seeds near the
    // sector's lowest point
    double min_z = std::numeric_limits<double>::infinity();
    for (uint32_t i : seeds) min_z = std::min(min_z, cloud.points[i].z());
    std::erase_if(seeds,
                  [&](uint32_t i) { return cloud.points[i].z() > min_z + params.seed_band; });
    // least-squares plane z = a*x + b*y + c over the seeds
    double a = 0.0, b = 0.0, c;
    if (seeds.size() >= 3) {
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atz = Eigen::Vector3d::Zero();
      for (uint32_t i : seeds) {
        const Vec3& p = cloud.points[i];
        const Eigen::Vector3d row(p.x(), p.y(), 1.0);
        ata += row * row.transpose();
        atz += row * p.z();
      }
      const Eigen::Vector3d sol = ata.ldlt().solve(atz);
      const double residual = (ata * sol - atz).norm();
      if (std::isfinite(sol.sum()) && residual <= 1e-6 * (1.0 + atz.norm())) {
        a = sol[0];
        b = sol[1];
        c = sol[2];
      } else {  // collinear seeds; fall back to a horizontal plane
        c = 0.0;
        for (uint32_t i : seeds) c += cloud.points[i].z();
        c /= double(seeds.size());
      }
    } else {
      c = 0.0;
      for (uint32_t i : seeds) c += cloud.points[i].z();
      c /= double(seeds.size());
    }
    for (uint32_t i : idx) {
      const Vec3& p = cloud.points[i];
      if (std::abs(p.z() - (a * p.x() + b * p.y() + c)) <= params.height_margin) mask[i] = 0;
    }
  }
  return mask;
}

}  // namespace rpcc

#endif  // RPCC_GROUND_HPP
