// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rpcc/rpcc.hpp"

using namespace rpcc;
using clock_type = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;

  void run(int number, const std::string& title, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = clock_type::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(clock_type::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", number,
                title.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

PointCloud random_scene_cloud(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> xy(-50.0, 50.0);
  std::uniform_real_distribution<double> z(-2.0, 4.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cloud.points.emplace_back(xy(rng), xy(rng), z(rng));
  return cloud;
}

std::vector<OrientedBox> random_scene_boxes(std::size_t count, uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0xb0b5ULL));
  std::uniform_real_distribution<double> xy(-48.0, 48.0);
  std::uniform_real_distribution<double> w(1.6, 2.2), l(3.8, 4.8), h(1.4, 1.8);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::vector<OrientedBox> boxes(count);
  for (OrientedBox& box : boxes) {
    box.center = Vec3(xy(rng), xy(rng), 1.0);
    box.width = w(rng);
    box.length = l(rng);
    box.height = h(rng);
    box.yaw = angle(rng);
  }
  return boxes;
}

SynthScene corpus_scene(uint64_t seed, int frames = 1) {
  SynthParams params;
  params.seed = seed;
  params.frames = frames;
  params.objects = 3;
  params.ground_points = 5000;
  params.points_per_object = 900;
  params.extent = 28.0;
  return generate_scene(params);
}

PlaneConfig corpus_plane() { return PlaneConfig::birds_eye(256, 256, 0.25); }

// Fidelity comparisons need pixels finer than the object point spacing so
// codec loss dominates nearest-wins occlusion.
PlaneConfig fine_plane() { return PlaneConfig::birds_eye(512, 512, 0.125); }

double occupied_depth_mse(const DepthImage& original, const DepthImage& decoded) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < original.pixels(); ++i) {
    if (!original.occupancy[i]) continue;
    const double e = double(decoded.depth[i]) - double(original.depth[i]);
    acc += e * e;
    ++count;
  }
  return acc / double(count);
}

bool criterion1(std::string& detail) {
  for (int scene = 0; scene < 50; ++scene) {
    const PointCloud cloud = random_scene_cloud(100000, 1000 + scene);
    const auto boxes = random_scene_boxes(50, 2000 + scene);
    if (points_in_boxes(cloud, boxes) != points_in_boxes_bruteforce(cloud, boxes)) {
      detail = "mismatch in scene " + std::to_string(scene);
      return false;
    }
  }
  detail = "50 scenes set-equal";
  return true;
}

// Per-box time of the k-d tree path is the per-box work (circumsphere ball
// query plus the hull membership test); index construction is one-time per
// cloud and reusable across boxes, so it is timed and reported separately.
bool criterion2(std::string& detail) {
  const PointCloud cloud = random_scene_cloud(100000, 777);
  const auto boxes = random_scene_boxes(100, 778);
  double build_ms = 0.0, query_ms = 0.0, brute_ms = 0.0;
  const int repeats = 3;
  for (int rep = 0; rep < repeats; ++rep) {
    const auto t0 = clock_type::now();
    const SpatialIndex index(cloud);
    const auto t1 = clock_type::now();
    const auto fast = points_in_boxes(cloud, boxes, &index);
    const auto t2 = clock_type::now();
    const auto brute = points_in_boxes_bruteforce(cloud, boxes);
    const auto t3 = clock_type::now();
    if (fast != brute) {
      detail = "paths disagree";
      return false;
    }
    build_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    query_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
    brute_ms += std::chrono::duration<double, std::milli>(t3 - t2).count();
  }
  const double per_box_tree = query_ms / repeats / double(boxes.size());
  const double per_box_brute = brute_ms / repeats / double(boxes.size());
  const double per_box_amortized = (query_ms + build_ms) / repeats / double(boxes.size());
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "kdtree %.4f ms/box (%.4f with build amortized, build %.1f ms) vs brute %.4f "
                "ms/box (ratio %.3f)",
                per_box_tree, per_box_amortized, build_ms / repeats, per_box_brute,
                per_box_tree / per_box_brute);
  detail = buf;
  return per_box_tree <= 0.5 * per_box_brute;
}

bool criterion3(std::string& detail) {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int64_t> w_dist(-(int64_t(1) << 20), int64_t(1) << 20);
  std::uniform_int_distribution<int> qp_dist(0, 51);
  constexpr int kM[6][3] = {{13107, 5243, 8066}, {11916, 4660, 7490}, {10082, 4194, 6554},
                            {9362, 3647, 5825},  {8192, 3355, 5243},  {7282, 2893, 4559}};
  for (int trial = 0; trial < 10000 / 16 + 1; ++trial) {
    Block4 w{};
    for (auto& v : w) v = w_dist(rng);
    const int qp = qp_dist(rng);
    const Block4 z = quantize(w, qp);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const int cls = (i % 2 == 0 && j % 2 == 0) ? 0 : (i % 2 == 1 && j % 2 == 1) ? 1 : 2;
        const double scaled =
            double(w[i * 4 + j]) * double(kM[qp % 6][cls]) / std::exp2(15 + qp / 6);
        if (z[i * 4 + j] != std::llround(scaled)) {
          detail = "mismatch at qp " + std::to_string(qp);
          return false;
        }
      }
  }
  detail = "10000+ (W, QP) pairs exact";
  return true;
}

bool criterion4(std::string& detail) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int64_t> sample(-32768, 32767);
  int64_t worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Block4 x{};
    for (auto& v : x) v = sample(rng);
    // matrix-product oracle with doubles
    const double core[4][4] = {{1, 1, 1, 1}, {2, 1, -1, -2}, {1, -1, -1, 1}, {1, -2, 2, -1}};
    double cx[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) cx[i][j] += core[i][k] * double(x[k * 4 + j]);
    const Block4 w = dct4x4_forward(x);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += cx[i][k] * core[j][k];
        if (double(w[i * 4 + j]) != acc) {
          detail = "forward transform differs from the matrix oracle";
          return false;
        }
      }
    const Block4 recon = dequantize_and_inverse(quantize(w, 0), 0);
    for (int i = 0; i < 16; ++i) worst = std::max(worst, std::abs(recon[i] - x[i]));
  }
  detail = "max |error| = " + std::to_string(worst);
  return worst <= 1;
}

bool criterion5(std::string& detail) {
  std::vector<DepthImage> corpus;
  const PlaneConfig plane = corpus_plane();
  for (int s = 0; s < 25; ++s) {
    const SynthScene scene = corpus_scene(9000 + s, 4);
    for (const PointCloud& cloud : scene.frames)
      corpus.push_back(project(cloud, plane).image);
  }
  uint64_t prev_bits = UINT64_MAX;
  double prev_mse = -1.0;
  std::string curve;
  for (int qp : {0, 10, 20, 30, 40, 50}) {
    uint64_t bits = 0;
    double mse = 0.0;
    for (const DepthImage& img : corpus) {
      const QpMap qp_map((img.width / 16) * (img.height / 16), uint8_t(qp));
      const EncodedFrame encoded = encode_frame(img, qp_map);
      bits += encoded.payload.size() * 8;
      const DecodedFrame decoded =
          decode_frame(encoded.payload.data(), encoded.payload.size(), img.plane, qp_map);
      mse += occupied_depth_mse(img, decoded.image);
    }
    mse /= double(corpus.size());
    curve += " qp" + std::to_string(qp) + ":" + std::to_string(bits / 8 / 1024) + "KiB";
    if (bits > prev_bits || mse < prev_mse) {
      detail = "monotonicity violated at qp " + std::to_string(qp);
      return false;
    }
    prev_bits = bits;
    prev_mse = mse;
  }
  detail = std::to_string(corpus.size()) + " frames;" + curve;
  return true;
}

bool criterion6(std::string& detail) {
  const PlaneConfig plane = fine_plane();
  double max_err_ratio = 0.0, max_bit_ratio = 0.0;
  for (int s = 0; s < 50; ++s) {
    const SynthScene scene = corpus_scene(20000 + s);
    const PointCloud& cloud = scene.frames[0];
    const RoiMask mask = roi_from_boxes(cloud, scene.boxes[0]);
    const std::vector<RoiMask> masks = {mask};
    const std::vector<PointCloud> clouds = {cloud};

    const EncodedSequence roi = encode_sequence(clouds, &masks, 20, 45, plane);
    const EncodedSequence uni20 = encode_sequence(clouds, nullptr, 20, 20, plane);
    const EncodedSequence uni45 = encode_sequence(clouds, nullptr, 45, 45, plane);

    const PointCloud recon_roi = reconstruct(decode_sequence(roi.bytes).frames[0]);
    const PointCloud recon_45 = reconstruct(decode_sequence(uni45.bytes).frames[0]);
    const double err_roi = roi_restricted_error(cloud, recon_roi, mask);
    const double err_45 = roi_restricted_error(cloud, recon_45, mask);
    if (err_roi > err_45) {
      detail = "RoI error regression in scene " + std::to_string(s);
      return false;
    }
    if (roi.bytes.size() > uni20.bytes.size()) {
      detail = "RoI bitstream larger than uniform-20 in scene " + std::to_string(s);
      return false;
    }
    max_err_ratio = std::max(max_err_ratio, err_roi / err_45);
    max_bit_ratio =
        std::max(max_bit_ratio, double(roi.bytes.size()) / double(uni20.bytes.size()));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "50 scenes; worst err ratio %.3f, worst bit ratio %.3f",
                max_err_ratio, max_bit_ratio);
  detail = buf;
  return true;
}

bool criterion7(std::string& detail) {
  std::mt19937_64 rng(1701);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_curve = [&](double x0, double offset) {
    std::vector<RateSample> samples;
    double x = x0;
    const int n = 3 + int(rng() % 5);
    for (int i = 0; i < n; ++i) {
      samples.push_back({x, unit(rng) + offset});
      x += 0.2 + unit(rng);
    }
    return RateCurve(samples);
  };

  // constant offset
  const RateCurve base = random_curve(1.0, 0.0);
  std::vector<RateSample> shifted;
  for (const RateSample& s : base.samples()) shifted.push_back({s.bitrate_mbps, s.value + 0.125});
  if (std::abs(averaged_advantage(RateCurve(shifted), base) - 0.125) > 1e-9) {
    detail = "constant offset not recovered";
    return false;
  }

  int tested = 0;
  for (int trial = 0; tested < 100; ++trial) {
    const RateCurve m = random_curve(0.5 + unit(rng), 0.0);
    const RateCurve mb = random_curve(0.5 + unit(rng), 2.0);
    const double x_min = std::max(m.min_x(), mb.min_x());
    const double x_max = std::min(m.max_x(), mb.max_x());
    if (!(x_max > x_min)) continue;
    ++tested;
    const double adv = averaged_advantage(m, mb);
    if (std::abs(averaged_advantage(mb, m) + adv) > 1e-9) {
      detail = "antisymmetry violated";
      return false;
    }
    const int n = 100000;
    double acc = 0.0;
    double prev = m.interpolate(x_min) - mb.interpolate(x_min);
    for (int i = 1; i <= n; ++i) {
      const double x = i == n ? x_max : x_min + (x_max - x_min) * double(i) / double(n);
      const double cur = m.interpolate(x) - mb.interpolate(x);
      acc += 0.5 * (prev + cur);
      prev = cur;
    }
    const double oracle = acc / double(n);
    if (std::abs(adv - oracle) > 1e-3 * std::abs(oracle)) {
      detail = "quadrature oracle disagreement on pair " + std::to_string(tested);
      return false;
    }
  }
  detail = "offset, antisymmetry, and 100 oracle pairs within tolerance";
  return true;
}

bool criterion8(std::string& detail) {
  double worst_object = 1.0, worst_far = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    SynthParams params;
    params.seed = 30000 + seed;
    params.objects = 3;
    params.ground_points = 6000;
    params.points_per_object = 1200;
    params.extent = 30.0;
    const SynthScene scene = generate_scene(params);
    const PointCloud& cloud = scene.frames[0];
    const RoiMask mask = roi_from_boxes(cloud, scene.boxes[0]);

    std::size_t object_total = 0, object_hit = 0, far_total = 0, far_hit = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (scene.object_labels[i]) {
        ++object_total;
        object_hit += mask[i];
      } else {
        double nearest = std::numeric_limits<double>::infinity();
        for (const OrientedBox& box : scene.boxes[0])
          nearest = std::min(nearest, (cloud.points[i] - box.center).head<2>().norm());
        if (nearest > 8.0) {
          ++far_total;
          far_hit += mask[i];
        }
      }
    }
    const double object_rate = double(object_hit) / double(object_total);
    const double far_rate = double(far_hit) / double(far_total);
    worst_object = std::min(worst_object, object_rate);
    worst_far = std::max(worst_far, far_rate);
    if (object_rate < 0.95 || far_rate > 0.05) {
      char buf[120];
      std::snprintf(buf, sizeof(buf), "seed %d: object %.3f, far-field %.4f", seed, object_rate,
                    far_rate);
      detail = buf;
      return false;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "20 seeds; worst object rate %.3f, worst far-field rate %.4f",
                worst_object, worst_far);
  detail = buf;
  return true;
}

bool criterion9(std::string& detail) {
  std::vector<SweepScene> scenes;
  for (int s = 0; s < 8; ++s) {
    const SynthScene synth = corpus_scene(40000 + s, 2);
    SweepScene scene;
    scene.id = "scene" + std::to_string(s);
    scene.clouds = synth.frames;
    // detect on the key frame, propagate to the second (the pipeline path)
    RoiMask key = roi_from_boxes(synth.frames[0], synth.boxes[0]);
    RoiMask next = propagate_mask(key, synth.frames[0], synth.frames[0].pose, synth.frames[1],
                                  synth.frames[1].pose, 0.1);
    scene.masks = {std::move(key), std::move(next)};
    scenes.push_back(std::move(scene));
  }
  SweepOptions options;
  options.q_r = 20;
  options.q_b_list = {30, 33, 36, 39, 42, 45};
  options.plane = fine_plane();

  options.roi_encoding = true;
  const SweepResult roi = run_sweep(scenes, options);
  options.roi_encoding = false;
  const SweepResult uniform = run_sweep(scenes, options);

  const double advantage = averaged_advantage(roi.roi_error_curve, uniform.roi_error_curve);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "advantage %.6g m^2 over 8 scenes x 6 QPs", advantage);
  detail = buf;
  return advantage < 0.0;
}

}  // namespace

int main() {
  Harness harness;
  harness.run(1, "points-in-boxes matches the brute-force oracle", criterion1);
  harness.run(2, "k-d tree path at most half the brute-force time per box", criterion2);
  harness.run(3, "quantizer matches the scalar oracle exactly", criterion3);
  harness.run(4, "forward transform exact; QP 0 round trip within one unit", criterion4);
  harness.run(5, "bits non-increasing and depth MSE non-decreasing in uniform QP", criterion5);
  harness.run(6, "RoI encoding beats uniform-45 fidelity within uniform-20 bits", criterion6);
  harness.run(7, "averaged advantage: offset, antisymmetry, quadrature oracle", criterion7);
  harness.run(8, "GMM pipeline recovers planted objects and rejects far field", criterion8);
  harness.run(9, "RoI error-bitrate curve dominates the uniform baseline", criterion9);
  if (harness.failures == 0) std::printf("all acceptance criteria passed\n");
  return harness.failures;
}
