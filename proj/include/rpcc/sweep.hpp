#ifndef RPCC_SWEEP_HPP
#define RPCC_SWEEP_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rpcc/io.hpp"
#include "rpcc/metrics.hpp"
#include "rpcc/parallel.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/sequence.hpp"

namespace rpcc {

struct SweepScene {
  std::string id;
  std::vector<PointCloud> clouds;
  std::vector<RoiMask> masks;  // always used for the RoI-restricted metric
  double frame_rate = 20.0;
};

struct SweepOptions {
  int q_r = 20;
  std::vector<int> q_b_list = {30, 33, 36, 39, 42, 45};
  PlaneConfig plane;
  bool roi_encoding = true;  // false: uniform q_b over the whole frame
  int workers = 1;
};

struct SweepRow {
  std::string scene;
  int q_r = 0;
  int q_b = 0;
  uint32_t frames = 0;
  uint64_t bits = 0;
  double bitrate_mbps = 0.0;
  double psnr_db = 0.0;
  double roi_error_m2 = 0.0;
  uint64_t dropped_points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RateCurve psnr_curve;       // mean PSNR vs mean bitrate
  RateCurve roi_error_curve;  // mean RoI-restricted error vs mean bitrate
};

// Measures one encoded sequence against its originals through a full
// container decode.
inline SweepRow measure_sequence(const SweepScene& scene, const EncodedSequence& encoded,
                                 int q_r, int q_b) {
  SweepRow row;
  row.scene = scene.id;
  row.q_r = q_r;
  row.q_b = q_b;
  row.frames = static_cast<uint32_t>(scene.clouds.size());
  row.bits = encoded.stats.total_bits;
  const double duration_s = double(scene.clouds.size()) / scene.frame_rate;
  row.bitrate_mbps = double(row.bits) / duration_s / 1e6;
  const DecodedSequence decoded = decode_sequence(encoded.bytes);
  double psnr_acc = 0.0, err_acc = 0.0;
  for (std::size_t t = 0; t < scene.clouds.size(); ++t) {
    const PointCloud recon = reconstruct(decoded.frames[t]);
    psnr_acc += p2p_distance(scene.clouds[t], recon).psnr;
    err_acc += roi_restricted_error(scene.clouds[t], recon, scene.masks[t]);
    row.dropped_points += decoded.dropped_points[t];
  }
  row.psnr_db = psnr_acc / double(scene.clouds.size());
  row.roi_error_m2 = err_acc / double(scene.clouds.size());
  return row;
}

// For each background QP: encode every scene, average bitrate and metrics
// across scenes, and emit one curve sample. Scenes run in parallel; the
// aggregation is an order-independent mean.
inline SweepResult run_sweep(const std::vector<SweepScene>& scenes, const SweepOptions& options) {
  if (scenes.empty()) throw std::invalid_argument("run_sweep: empty scene set");
  SweepResult result;
  std::vector<RateSample> psnr_samples, err_samples;
  for (int q_b : options.q_b_list) {
    std::vector<SweepRow> rows(scenes.size());
    parallel_for(scenes.size(), options.workers, [&](std::size_t s) {
      const SweepScene& scene = scenes[s];
      const EncodedSequence encoded =
          encode_sequence(scene.clouds, options.roi_encoding ? &scene.masks : nullptr,
                          options.q_r, q_b, options.plane);
      rows[s] = measure_sequence(scene, encoded, options.roi_encoding ? options.q_r : q_b, q_b);
    });
    double bitrate = 0.0, psnr = 0.0, err = 0.0;
    for (const SweepRow& row : rows) {
      bitrate += row.bitrate_mbps;
      psnr += row.psnr_db;
      err += row.roi_error_m2;
      result.rows.push_back(row);
    }
    const double n = double(rows.size());
    psnr_samples.push_back({bitrate / n, psnr / n});
    err_samples.push_back({bitrate / n, err / n});
  }
  auto ascending = [](const RateSample& a, const RateSample& b) {
    return a.bitrate_mbps < b.bitrate_mbps;
  };
  std::sort(psnr_samples.begin(), psnr_samples.end(), ascending);
  std::sort(err_samples.begin(), err_samples.end(), ascending);
  result.psnr_curve = RateCurve(psnr_samples);
  result.roi_error_curve = RateCurve(err_samples);
  return result;
}

namespace io {

inline void write_rows_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "scene,q_r,q_b,frames,bits,bitrate_mbps,psnr_db,roi_error_m2,dropped_points\n";
  out.precision(10);
  for (const SweepRow& row : rows)
    out << row.scene << ',' << row.q_r << ',' << row.q_b << ',' << row.frames << ',' << row.bits
        << ',' << row.bitrate_mbps << ',' << row.psnr_db << ',' << row.roi_error_m2 << ','
        << row.dropped_points << '\n';
  atomic_write(path, out.str());
}

// Long-format samples for plotting: one row per (method, metric, sample).
inline void write_curves_csv(
    const std::filesystem::path& path,
    const std::vector<std::tuple<std::string, std::string, RateCurve>>& curves) {
  std::ostringstream out;
  out << "method,metric,bitrate_mbps,value\n";
  out.precision(10);
  for (const auto& [method, metric, curve] : curves)
    for (const RateSample& s : curve.samples())
      out << method << ',' << metric << ',' << s.bitrate_mbps << ',' << s.value << '\n';
  atomic_write(path, out.str());
}

}  // namespace io
}  // namespace rpcc

#endif  // RPCC_SWEEP_HPP
