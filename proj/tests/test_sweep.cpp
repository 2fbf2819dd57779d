#include <catch2/catch_amalgamated.hpp>

#include "rpcc/sweep.hpp"
#include "rpcc/synth.hpp"

using namespace rpcc;

namespace {

SweepScene make_scene(uint64_t seed) {
  SynthParams params;
  params.seed = seed;
  params.objects = 2;
  params.ground_points = 3000;
  params.points_per_object = 600;
  params.extent = 22.0;
  const SynthScene synth = generate_scene(params);
  SweepScene scene;
  scene.id = "s" + std::to_string(seed);
  scene.clouds = synth.frames;
  scene.masks = {synth.object_labels};
  return scene;
}

SweepOptions base_options() {
  SweepOptions options;
  options.q_r = 20;
  options.q_b_list = {30, 38, 45};
  options.plane = PlaneConfig::birds_eye(256, 256, 0.2);
  return options;
}

}  // namespace

TEST_CASE("uniform sweep produces monotone curves over the QP list") {
  const std::vector<SweepScene> scenes = {make_scene(1), make_scene(2)};
  SweepOptions options = base_options();
  options.roi_encoding = false;
  const SweepResult result = run_sweep(scenes, options);

  REQUIRE(result.rows.size() == 6);  // 3 QPs x 2 scenes
  REQUIRE(result.psnr_curve.size() == 3);
  // coarser QP means fewer bits; curves are sorted by ascending bitrate
  for (const SweepRow& row : result.rows) REQUIRE(row.bits > 0);
  const auto& psnr = result.psnr_curve.samples();
  for (std::size_t i = 1; i < psnr.size(); ++i) {
    REQUIRE(psnr[i].bitrate_mbps > psnr[i - 1].bitrate_mbps);
    REQUIRE(psnr[i].value >= psnr[i - 1].value);  // PSNR improves with bitrate
  }
  const auto& err = result.roi_error_curve.samples();
  for (std::size_t i = 1; i < err.size(); ++i) REQUIRE(err[i].value <= err[i - 1].value);

  // a curve measured against itself has no advantage
  REQUIRE(averaged_advantage(result.psnr_curve, result.psnr_curve) == 0.0);
}

TEST_CASE("sweep results are independent of the worker count") {
  const std::vector<SweepScene> scenes = {make_scene(3), make_scene(4), make_scene(5)};
  SweepOptions options = base_options();
  options.workers = 1;
  const SweepResult serial = run_sweep(scenes, options);
  options.workers = 4;
  const SweepResult parallel = run_sweep(scenes, options);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    REQUIRE(serial.rows[i].scene == parallel.rows[i].scene);
    REQUIRE(serial.rows[i].bits == parallel.rows[i].bits);
    REQUIRE(serial.rows[i].psnr_db == parallel.rows[i].psnr_db);
    REQUIRE(serial.rows[i].roi_error_m2 == parallel.rows[i].roi_error_m2);
  }
}

TEST_CASE("single-frame bitrate follows the frame-rate convention") {
  const std::vector<SweepScene> scenes = {make_scene(6)};
  SweepOptions options = base_options();
  options.q_b_list = {38};
  options.roi_encoding = false;
  const SweepResult result = run_sweep(scenes, options);
  REQUIRE(result.rows.size() == 1);
  const SweepRow& row = result.rows[0];
  // one frame at 20 Hz lasts 1/20 s: Mbps = bits * 20 / 1e6
  REQUIRE(row.bitrate_mbps == Catch::Approx(double(row.bits) * 20.0 / 1e6).epsilon(1e-12));
}

TEST_CASE("worker exceptions surface as ordinary errors") {
  SweepScene bad = make_scene(8);
  for (Vec3& p : bad.clouds[0].points) p += Vec3(1e6, 1e6, 0.0);  // off the plane footprint
  SweepOptions options = base_options();
  options.workers = 4;
  const std::vector<SweepScene> scenes = {make_scene(9), bad};
  REQUIRE_THROWS_AS(run_sweep(scenes, options), std::invalid_argument);
}

TEST_CASE("roi sweep never spends more bits than the fine uniform encode") {
  const std::vector<SweepScene> scenes = {make_scene(7)};
  SweepOptions options = base_options();
  options.q_b_list = {45};
  const SweepResult roi = run_sweep(scenes, options);
  options.roi_encoding = false;
  options.q_b_list = {20};
  const SweepResult uniform20 = run_sweep(scenes, options);
  REQUIRE(roi.rows[0].bits <= uniform20.rows[0].bits);
}
