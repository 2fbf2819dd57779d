#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rpcc/rpcc.hpp"

namespace fs = std::filesystem;
using namespace rpcc;

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::string stage) : stage_(std::move(stage)), start_(clock::now()) {}
  ~StageTimer() {
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    std::fprintf(stderr, "timing stage=%s ms=%.3f\n", stage_.c_str(), ms);
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string stage_;
  clock::time_point start_;
};

std::string frame_mask_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04zu.rlm", t);
  return buf;
}

std::string frame_cloud_name(std::size_t t, const char* ext) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "frame_%04zu.%s", t, ext);
  return buf;
}

struct PlaneFlags {
  int image_size = 512;
  double pitch = 0.2;
  double clearance = 5.0;
  double depth_scale = 0.0015625;
  double depth_offset = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--image-size", image_size, "Geometry image edge in pixels (multiple of 16)")
        ->capture_default_str();
    cmd->add_option("--pitch", pitch, "Meters per pixel")->capture_default_str();
    cmd->add_option("--clearance", clearance, "Projection plane depth below the sensor origin")
        ->capture_default_str();
    cmd->add_option("--depth-scale", depth_scale, "Meters per 16-bit depth unit")
        ->capture_default_str();
    cmd->add_option("--depth-offset", depth_offset, "Depth offset in meters")
        ->capture_default_str();
  }

  PlaneConfig build() const {
    PlaneConfig plane = PlaneConfig::birds_eye(image_size, image_size, pitch, clearance);
    plane.depth_scale = depth_scale;
    plane.depth_offset = depth_offset;
    plane.validate();
    return plane;
  }
};

struct LoadedScene {
  SceneManifest manifest;
  std::vector<PointCloud> clouds;
  std::vector<std::vector<OrientedBox>> boxes;  // empty vectors where absent
};

LoadedScene load_scene(const fs::path& manifest_path) {
  LoadedScene scene;
  scene.manifest = io::read_manifest(manifest_path);
  for (const FrameEntry& entry : scene.manifest.frames) {
    PointCloud cloud = io::read_cloud_binary(scene.manifest.resolve(entry.cloud_path));
    cloud.frame_index = entry.frame_index;
    cloud.pose = entry.pose;
    cloud.validate();
    scene.clouds.push_back(std::move(cloud));
    if (!entry.boxes_path.empty() &&
        fs::exists(scene.manifest.resolve(entry.boxes_path))) {
      scene.boxes.push_back(io::read_boxes_json(scene.manifest.resolve(entry.boxes_path)));
    } else {
      scene.boxes.push_back({});
    }
  }
  return scene;
}

std::vector<RoiMask> load_masks(const fs::path& dir, const std::vector<PointCloud>& clouds) {
  std::vector<RoiMask> masks;
  for (std::size_t t = 0; t < clouds.size(); ++t) {
    RoiMask mask = io::read_mask_rle(dir / frame_mask_name(t));
    if (mask.size() != clouds[t].size())
      throw IoError("mask length does not match cloud for frame " + std::to_string(t));
    masks.push_back(std::move(mask));
  }
  return masks;
}

int run_synth(const fs::path& out_dir, const SynthParams& params, const std::string& id) {
  SynthScene scene;
  {
    StageTimer timer("synth.generate");
    scene = generate_scene(params);
  }
  {
    StageTimer timer("synth.write");
    write_scene(out_dir, scene, id);
  }
  std::printf("scene %s: %d frame(s), %zu points/frame, %zu object(s) -> %s\n", id.c_str(),
              params.frames, scene.frames.empty() ? 0 : scene.frames[0].size(),
              scene.world_boxes.size(), out_dir.string().c_str());
  return 0;
}

int run_roi(const fs::path& manifest_path, const fs::path& out_dir, const RoiParams& params,
            int stride, bool export_heatmaps) {
  const LoadedScene scene = load_scene(manifest_path);
  fs::create_directories(out_dir);

  std::vector<RoiMask> masks(scene.clouds.size());
  std::size_t key = 0;
  for (std::size_t t = 0; t < scene.clouds.size(); ++t) {
    if (t % std::size_t(stride) == 0) {
      key = t;
      if (scene.boxes[t].empty())
        throw IoError("key frame " + std::to_string(t) + " has no boxes file");
      StageTimer timer("roi.detect");
      masks[t] = roi_from_boxes(scene.clouds[t], scene.boxes[t], params);
      if (export_heatmaps) {
        std::vector<std::pair<Gmm2, int>> gmms;
        const auto inner = points_in_boxes(scene.clouds[t], scene.boxes[t]);
        for (std::size_t j = 0; j < scene.boxes[t].size(); ++j) {
          if (inner[j].empty()) continue;
          std::vector<Vec3> pts;
          for (uint32_t idx : inner[j]) pts.push_back(scene.clouds[t].points[idx]);
          gmms.emplace_back(
              project_gmm(fit_gmm(pts, params.k_components, 100, 1e-6,
                                  box_seed(scene.boxes[t][j]))),
              scene.boxes[t][j].class_id);
        }
        const RoiHeatmap heat =
            rasterize_heatmap(gmms, params.grid, 0, params.confidence_exponent);
        for (int ch = 0; ch < heat.num_classes; ++ch) {
          char name[64];
          std::snprintf(name, sizeof(name), "frame_%04zu.class%d.pgm", t, ch);
          io::write_heatmap_pgm(out_dir / name, heat.channels[ch], heat.geom);
        }
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%04zu.grid.json", t);
        io::write_grid_geometry_json(out_dir / name, heat.geom, heat.num_classes);
      }
    } else {
      StageTimer timer("roi.propagate");
      masks[t] = propagate_mask(masks[key], scene.clouds[key], scene.clouds[key].pose,
                                scene.clouds[t], scene.clouds[t].pose,
                                params.propagation_radius);
    }
    io::write_mask_rle(out_dir / frame_mask_name(t), masks[t]);
  }
  std::printf("wrote %zu mask(s) to %s\n", masks.size(), out_dir.string().c_str());
  return 0;
}

int run_encode(const fs::path& manifest_path, const fs::path& masks_dir, const fs::path& out_path,
               int q_r, int q_b, const PlaneConfig& plane, int workers) {
  const LoadedScene scene = load_scene(manifest_path);
  std::vector<RoiMask> masks;
  const bool roi_mode = !masks_dir.empty();
  if (roi_mode) masks = load_masks(masks_dir, scene.clouds);

  EncodedSequence encoded;
  {
    StageTimer timer("encode.sequence");
    encoded = encode_sequence(scene.clouds, roi_mode ? &masks : nullptr, q_r, q_b, plane, workers);
  }
  io::atomic_write(out_path, encoded.bytes);
  uint64_t dropped = 0, roi_mbs = 0;
  for (uint32_t d : encoded.stats.dropped_points) dropped += d;
  for (uint32_t m : encoded.stats.roi_macroblocks) roi_mbs += m;
  const double duration = double(scene.clouds.size()) / scene.manifest.frame_rate;
  std::printf("%s: %zu frame(s), %llu bits (%.3f Mbps), %llu RoI macroblock(s), %llu dropped point(s)\n",
              out_path.string().c_str(), scene.clouds.size(),
              static_cast<unsigned long long>(encoded.stats.total_bits),
              double(encoded.stats.total_bits) / duration / 1e6,
              static_cast<unsigned long long>(roi_mbs),
              static_cast<unsigned long long>(dropped));
  return 0;
}

int run_decode(const fs::path& bitstream_path, const fs::path& out_dir, bool as_ply) {
  const auto bytes = io::read_file(bitstream_path);
  DecodedSequence decoded;
  {
    StageTimer timer("decode.sequence");
    decoded = decode_sequence(bytes);
  }
  fs::create_directories(out_dir);
  for (std::size_t t = 0; t < decoded.frames.size(); ++t) {
    const PointCloud cloud = reconstruct(decoded.frames[t]);
    if (as_ply)
      io::write_cloud_ply(out_dir / frame_cloud_name(t, "ply"), cloud);
    else
      io::write_cloud_binary(out_dir / frame_cloud_name(t, "pcb"), cloud);
  }
  std::printf("decoded %zu frame(s) to %s\n", decoded.frames.size(), out_dir.string().c_str());
  return 0;
}

int run_eval(const std::vector<fs::path>& manifest_paths, const std::string& masks_subdir,
             const fs::path& out_dir, int q_r, std::vector<int> q_b_list,
             const PlaneConfig& plane, int workers) {
  std::vector<SweepScene> scenes;
  for (const fs::path& path : manifest_paths) {
    const LoadedScene loaded = load_scene(path);
    SweepScene scene;
    scene.id = loaded.manifest.sequence_id;
    scene.frame_rate = loaded.manifest.frame_rate;
    scene.clouds = loaded.clouds;
    scene.masks = load_masks(path.parent_path() / masks_subdir, loaded.clouds);
    scenes.push_back(std::move(scene));
  }

  SweepOptions options;
  options.q_r = q_r;
  options.q_b_list = std::move(q_b_list);
  options.plane = plane;
  options.workers = workers;

  SweepResult roi, uniform;
  {
    StageTimer timer("eval.roi_sweep");
    options.roi_encoding = true;
    roi = run_sweep(scenes, options);
  }
  {
    StageTimer timer("eval.uniform_sweep");
    options.roi_encoding = false;
    uniform = run_sweep(scenes, options);
  }

  fs::create_directories(out_dir);
  io::write_rows_csv(out_dir / "roi_rows.csv", roi.rows);
  io::write_rows_csv(out_dir / "uniform_rows.csv", uniform.rows);
  const std::vector<std::tuple<std::string, std::string, RateCurve>> curves = {
      {"roi", "psnr_db", roi.psnr_curve},
      {"roi", "roi_error_m2", roi.roi_error_curve},
      {"uniform", "psnr_db", uniform.psnr_curve},
      {"uniform", "roi_error_m2", uniform.roi_error_curve}};
  for (const auto& [method, metric, curve] : curves)
    io::write_curves_csv(out_dir / (method + "_" + metric + "_curve.csv"), {{method, metric, curve}});
  io::write_curves_csv(out_dir / "curves.csv", curves);

  const double adv_error = averaged_advantage(roi.roi_error_curve, uniform.roi_error_curve);
  const double adv_psnr = averaged_advantage(roi.psnr_curve, uniform.psnr_curve);
  std::ostringstream report;
  report.precision(10);
  report << "metric,advantage\nroi_error_m2," << adv_error << "\npsnr_db," << adv_psnr << "\n";
  io::atomic_write(out_dir / "advantage.csv", report.str());
  std::printf("averaged advantage (roi - uniform): roi_error_m2 %+.6g, psnr_db %+.4f dB\n",
              adv_error, adv_psnr);
  return 0;
}

int run_bench_pib(int point_count, int box_count, int repeats, uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> xy(-50.0, 50.0);
  std::uniform_real_distribution<double> z(-2.0, 4.0);
  PointCloud cloud;
  cloud.points.reserve(point_count);
  for (int i = 0; i < point_count; ++i) cloud.points.emplace_back(xy(rng), xy(rng), z(rng));

  std::uniform_real_distribution<double> dim_w(1.6, 2.2), dim_l(3.8, 4.8), dim_h(1.4, 1.8);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::vector<OrientedBox> boxes(box_count);
  for (OrientedBox& box : boxes) {
    box.center = Vec3(xy(rng), xy(rng), 1.0);
    box.width = dim_w(rng);
    box.length = dim_l(rng);
    box.height = dim_h(rng);
    box.yaw = angle(rng);
  }

  using clock = std::chrono::steady_clock;
  double build_ms = 0.0, query_ms = 0.0, brute_ms = 0.0;
  std::vector<std::vector<uint32_t>> fast, brute;
  for (int rep = 0; rep < repeats; ++rep) {
    auto t0 = clock::now();
    const SpatialIndex index(cloud);
    auto t1 = clock::now();
    fast = points_in_boxes(cloud, boxes, &index);
    auto t2 = clock::now();
    brute = points_in_boxes_bruteforce(cloud, boxes);
    auto t3 = clock::now();
    build_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    query_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
    brute_ms += std::chrono::duration<double, std::milli>(t3 - t2).count();
  }
  if (fast != brute) {
    std::fprintf(stderr, "error: fast path disagrees with the brute-force baseline\n");
    return 4;
  }
  const double per_box_tree = query_ms / repeats / box_count;
  const double per_box_brute = brute_ms / repeats / box_count;
  std::printf("points=%d boxes=%d repeats=%d\n", point_count, box_count, repeats);
  std::printf("index build (one-time per cloud): %.2f ms\n", build_ms / repeats);
  std::printf("kdtree:      %.4f ms/box (%.4f with build amortized)\n", per_box_tree,
              (query_ms + build_ms) / repeats / box_count);
  std::printf("brute-force: %.4f ms/box\n", per_box_brute);
  std::printf("speedup:     %.2fx per box\n", per_box_brute / per_box_tree);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RoI-aware point cloud sequence codec"};
  app.set_config("--config", "", "Read options from a TOML/INI file (sections per subcommand)");
  app.require_subcommand(1);

  int workers = default_workers();
  app.add_option("--workers", workers, "Worker thread count (env RPCC_WORKERS)")
      ->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  SynthParams synth_params;
  std::string synth_out, synth_id = "scene";
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--id", synth_id, "Sequence id")->capture_default_str();
  synth->add_option("--seed", synth_params.seed, "RNG seed")->capture_default_str();
  synth->add_option("--frames", synth_params.frames, "Frame count")->capture_default_str();
  synth->add_option("--objects", synth_params.objects, "Object count")->capture_default_str();
  synth->add_option("--ground-points", synth_params.ground_points, "Ground point count")
      ->capture_default_str();
  synth->add_option("--points-per-object", synth_params.points_per_object, "Points per object")
      ->capture_default_str();
  synth->add_option("--extent", synth_params.extent, "Ground half extent in meters")
      ->capture_default_str();
  synth->add_option("--noise", synth_params.ground_noise, "Ground z noise sigma")
      ->capture_default_str();
  synth->add_option("--slope-x", synth_params.ground_slope_x, "Ground slope along x")
      ->capture_default_str();
  synth->add_option("--slope-y", synth_params.ground_slope_y, "Ground slope along y")
      ->capture_default_str();
  synth->add_option("--speed", synth_params.speed, "Ego meters per frame")->capture_default_str();
  synth->add_option("--yaw-rate", synth_params.yaw_rate, "Ego yaw per frame (radians)")
      ->capture_default_str();
  synth->add_flag("--intensity", synth_params.with_intensity, "Attach per-point intensity");

  // roi
  auto* roi = app.add_subcommand("roi", "Detect RoI masks for a scene");
  std::string roi_manifest, roi_out;
  RoiParams roi_params;
  int roi_stride = 10;
  bool roi_heatmaps = false;
  roi->add_option("--manifest", roi_manifest, "Scene manifest")->required();
  roi->add_option("--out", roi_out, "Output mask directory")->required();
  roi->add_option("--k", roi_params.k_components, "GMM components per object")
      ->capture_default_str();
  roi->add_option("--gamma", roi_params.gamma, "Heatmap binarization threshold")
      ->capture_default_str();
  roi->add_option("--stride", roi_stride, "Detect every S-th frame, propagate the rest")
      ->capture_default_str();
  roi->add_option("--radius", roi_params.propagation_radius, "Mask propagation radius (meters)")
      ->capture_default_str();
  roi->add_option("--confidence-exponent", roi_params.confidence_exponent,
                  "Peak-normalized density compression exponent")
      ->capture_default_str();
  int roi_grid_cells = 200;
  double roi_grid_extent = 50.0;
  roi->add_option("--grid-cells", roi_grid_cells, "RoI grid cells per side")
      ->capture_default_str();
  roi->add_option("--grid-extent", roi_grid_extent, "RoI grid half extent in meters")
      ->capture_default_str();
  roi->add_flag("--heatmaps", roi_heatmaps, "Export per-class 16-bit PGM heatmaps");

  // encode
  auto* encode = app.add_subcommand("encode", "Encode a scene to a bitstream");
  std::string enc_manifest, enc_masks, enc_out;
  int enc_qr = 20, enc_qb = 45;
  PlaneFlags enc_plane;
  encode->add_option("--manifest", enc_manifest, "Scene manifest")->required();
  encode->add_option("--masks", enc_masks, "Mask directory (omit for uniform encoding)");
  encode->add_option("--out", enc_out, "Output bitstream path")->required();
  encode->add_option("--qr", enc_qr, "RoI quantization parameter")->capture_default_str();
  encode->add_option("--qb", enc_qb, "Background quantization parameter")->capture_default_str();
  enc_plane.attach(encode);

  // decode
  auto* decode = app.add_subcommand("decode", "Decode a bitstream to point clouds");
  std::string dec_in, dec_out;
  bool dec_ply = false;
  decode->add_option("--bitstream", dec_in, "Input bitstream")->required();
  decode->add_option("--out", dec_out, "Output directory")->required();
  decode->add_flag("--ply", dec_ply, "Write ASCII PLY instead of binary clouds");

  // eval
  auto* eval = app.add_subcommand("eval", "Rate-quality sweep and averaged advantage");
  std::vector<std::string> eval_manifests;
  std::string eval_masks_subdir = "masks", eval_out;
  int eval_qr = 20;
  std::vector<int> eval_qb = {30, 33, 36, 39, 42, 45};
  PlaneFlags eval_plane;
  eval->add_option("--manifest", eval_manifests, "Scene manifest (repeatable)")->required();
  eval->add_option("--masks-subdir", eval_masks_subdir,
                   "Mask directory relative to each manifest")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Output directory for CSV reports")->required();
  eval->add_option("--qr", eval_qr, "RoI quantization parameter")->capture_default_str();
  eval->add_option("--qb-list", eval_qb, "Background QP sweep values")->capture_default_str();
  eval_plane.attach(eval);

  // bench-pib
  auto* bench = app.add_subcommand("bench-pib", "Points-in-boxes speed harness");
  int bench_points = 100000, bench_boxes = 100, bench_repeats = 3;
  uint64_t bench_seed = 0;
  bench->add_option("--points", bench_points, "Scene point count")->capture_default_str();
  bench->add_option("--boxes", bench_boxes, "Box count")->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "Timing repetitions")->capture_default_str();
  bench->add_option("--seed", bench_seed, "RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) return run_synth(synth_out, synth_params, synth_id);
    if (*roi) {
      if (roi_stride < 1) throw std::invalid_argument("stride must be >= 1");
      if (roi_grid_cells < 1 || !(roi_grid_extent > 0.0))
        throw std::invalid_argument("grid geometry must be positive");
      roi_params.grid.width = roi_params.grid.height = roi_grid_cells;
      roi_params.grid.origin_x = roi_params.grid.origin_y = -roi_grid_extent;
      roi_params.grid.cell_size = 2.0 * roi_grid_extent / roi_grid_cells;
      roi_params.workers = workers;
      return run_roi(roi_manifest, roi_out, roi_params, roi_stride, roi_heatmaps);
    }
    if (*encode)
      return run_encode(enc_manifest, enc_masks, enc_out, enc_qr, enc_qb, enc_plane.build(),
                        workers);
    if (*decode) return run_decode(dec_in, dec_out, dec_ply);
    if (*eval)
      return run_eval({eval_manifests.begin(), eval_manifests.end()}, eval_masks_subdir, eval_out,
                      eval_qr, eval_qb, eval_plane.build(), workers);
    if (*bench) return run_bench_pib(bench_points, bench_boxes, bench_repeats, bench_seed);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
  return 2;
}
