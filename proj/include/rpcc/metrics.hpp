#ifndef RPCC_METRICS_HPP
#define RPCC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rpcc/geometry.hpp"
#include "rpcc/heatmap.hpp"
#include "rpcc/kdtree.hpp"

namespace rpcc {

constexpr double kPsnrCap = 200.0;      // dB reported when mse < kMseFloor
constexpr double kMseFloor = 1e-12;     // m^2

struct P2PResult {
  double mse = 0.0;   // m^2
  double psnr = 0.0;  // dB
};

inline double bounding_box_diagonal(const PointCloud& cloud) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

namespace detail {

inline double one_directional_mse(const std::vector<Vec3>& from, const SpatialIndex& to_index) {
  double acc = 0.0;
  for (const Vec3& p : from) acc += to_index.nearest(p).second;
  return acc / double(from.size());
}

}  // namespace detail

// Symmetric nearest-neighbor MSE and PSNR. Peak defaults to the diagonal of
// the first cloud's bounding box.
inline P2PResult p2p_distance(const PointCloud& a, const PointCloud& b, double peak = 0.0) {
  if (a.empty() || b.empty()) throw std::invalid_argument("p2p_distance: empty cloud");
  const SpatialIndex index_a(a), index_b(b);
  const double forward = detail::one_directional_mse(a.points, index_b);
  const double backward = detail::one_directional_mse(b.points, index_a);
  P2PResult out;
  out.mse = 0.5 * (forward + backward);
  if (out.mse < kMseFloor) {
    out.psnr = kPsnrCap;
    return out;
  }
  if (peak <= 0.0) peak = bounding_box_diagonal(a);
  if (!(peak > 0.0))
    throw std::invalid_argument("p2p_distance: signal peak is not positive (degenerate cloud)");
  out.psnr = std::min(kPsnrCap, 10.0 * std::log10(peak * peak / out.mse));
  return out;
}

// One-directional mean squared distance from the original's RoI points into
// the reconstructed cloud.
inline double roi_restricted_error(const PointCloud& original, const PointCloud& reconstructed,
                                   const RoiMask& mask) {
  if (mask.size() != original.size())
    throw std::invalid_argument("roi_restricted_error: mask not aligned to cloud");
  if (reconstructed.empty()) throw std::invalid_argument("roi_restricted_error: empty cloud");
  std::vector<Vec3> roi_points;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) roi_points.push_back(original.points[i]);
  if (roi_points.empty()) throw std::invalid_argument("roi_restricted_error: empty RoI");
  return detail::one_directional_mse(roi_points, SpatialIndex(reconstructed));
}

struct RateSample {
  double bitrate_mbps = 0.0;
  double value = 0.0;
};

// Metric-bitrate curve, strictly increasing in bitrate, piecewise-linear.
class RateCurve {
 public:
  RateCurve() = default;

  explicit RateCurve(std::vector<RateSample> samples) : samples_(std::move(samples)) {
    for (const RateSample& s : samples_)
      if (!(s.bitrate_mbps > 0.0)) throw std::invalid_argument("rate curve: bitrate must be positive");
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (!(samples_[i].bitrate_mbps > samples_[i - 1].bitrate_mbps))
        throw std::invalid_argument("rate curve: bitrates must be strictly increasing");
  }

  const std::vector<RateSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double min_x() const { return samples_.front().bitrate_mbps; }
  double max_x() const { return samples_.back().bitrate_mbps; }

  // Linear interpolation; no extrapolation outside the sample range.
  double interpolate(double x) const {
    if (samples_.empty()) throw std::invalid_argument("rate curve: empty");
    if (x < min_x() || x > max_x())
      throw std::invalid_argument("rate curve: interpolation outside sample range");
    auto it = std::lower_bound(samples_.begin(), samples_.end(), x,
                               [](const RateSample& s, double v) { return s.bitrate_mbps < v; });
    if (it == samples_.begin()) return it->value;
    const RateSample& hi = *it;
    const RateSample& lo = *(it - 1);
    if (hi.bitrate_mbps == x) return hi.value;
    const double t = (x - lo.bitrate_mbps) / (hi.bitrate_mbps - lo.bitrate_mbps);
    return lo.value + t * (hi.value - lo.value);
  }

 private:
  std::vector<RateSample> samples_;
};

// Mean vertical gap between two curves over their shared bitrate domain:
// (1/N) * sum_i [M(x_i) - Mb(x_i)] at N uniformly spaced abscissae. The x_i
// are interval midpoints, which keeps the sample mean within O(1/N^2) of the
// exact integral for piecewise-linear curves.
inline double averaged_advantage(const RateCurve& curve_m, const RateCurve& curve_mb,
                                 int samples = 100) {
  if (curve_m.size() < 2 || curve_mb.size() < 2)
    throw std::invalid_argument("averaged_advantage: curves need at least two samples");
  if (samples < 1) throw std::invalid_argument("averaged_advantage: need at least one sample");
  const double x_min = std::max(curve_m.min_x(), curve_mb.min_x());
  const double x_max = std::min(curve_m.max_x(), curve_mb.max_x());
  if (!(x_max > x_min))
    throw std::invalid_argument("averaged_advantage: curves do not overlap in bitrate");
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = x_min + (x_max - x_min) * (double(i) + 0.5) / double(samples);
    acc += curve_m.interpolate(x) - curve_mb.interpolate(x);
  }
  return acc / double(samples);
}

}  // namespace rpcc

#endif  // RPCC_METRICS_HPP
