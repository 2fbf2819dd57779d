#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rpcc/ground.hpp"

using namespace rpcc;

namespace {

struct LabeledScene {
  PointCloud cloud;
  std::vector<uint8_t> is_object;
};

LabeledScene plane_plus_cluster(double slope_x, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-30.0, 30.0);
  std::normal_distribution<double> jitter(0.0, 0.02);
  LabeledScene scene;
  for (int i = 0; i < 6000; ++i) {
    const double x = xy(rng), y = xy(rng);
    scene.cloud.points.emplace_back(x, y, slope_x * x + jitter(rng));
    scene.is_object.push_back(0);
  }
  std::uniform_real_distribution<double> local(-1.0, 1.0);
  std::uniform_real_distribution<double> zdist(0.5, 2.5);
  for (int i = 0; i < 1200; ++i) {
    const double x = 8.0 + local(rng), y = -5.0 + local(rng);
    scene.cloud.points.emplace_back(x, y, slope_x * x + zdist(rng));
    scene.is_object.push_back(1);
  }
  return scene;
}

}  // namespace

TEST_CASE("empty cloud yields an empty mask") {
  REQUIRE(ground_mask(PointCloud{}).empty());
}

TEST_CASE("flat plane with an elevated cluster separates at 99 percent") {
  const LabeledScene scene = plane_plus_cluster(0.0, 101);
  const RoiMask fg = ground_mask(scene.cloud);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < fg.size(); ++i) agree += fg[i] == scene.is_object[i];
  REQUIRE(double(agree) / double(fg.size()) >= 0.99);
}

TEST_CASE("five degree slope still separates at 95 percent") {
  const double slope = std::tan(5.0 * M_PI / 180.0);
  const LabeledScene scene = plane_plus_cluster(slope, 102);
  const RoiMask fg = ground_mask(scene.cloud);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < fg.size(); ++i) agree += fg[i] == scene.is_object[i];
  REQUIRE(double(agree) / double(fg.size()) >= 0.95);
}

TEST_CASE("points well above the margin are foreground") {
  PointCloud cloud;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xy(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) cloud.points.emplace_back(xy(rng), xy(rng), 0.0);
  cloud.points.emplace_back(3.0, 3.0, 5.0);
  const RoiMask fg = ground_mask(cloud);
  REQUIRE(fg.back() == 1);
  std::size_t ground = 0;
  for (std::size_t i = 0; i + 1 < fg.size(); ++i) ground += fg[i] == 0;
  REQUIRE(ground == fg.size() - 1);
}
