#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rpcc/boxes.hpp"

using namespace rpcc;

namespace {

PointCloud random_cloud(std::size_t n, double extent, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-extent, extent);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
  return cloud;
}

std::vector<OrientedBox> random_boxes(std::size_t count, double extent, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-extent, extent);
  std::uniform_real_distribution<double> dim(0.5, 6.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::vector<OrientedBox> boxes(count);
  for (OrientedBox& box : boxes) {
    box.center = Vec3(center(rng), center(rng), center(rng));
    box.width = dim(rng);
    box.length = dim(rng);
    box.height = dim(rng);
    box.yaw = angle(rng);
  }
  return boxes;
}

}  // namespace

TEST_CASE("point at the box center is inside, far point is outside") {
  OrientedBox box;
  box.center = Vec3(3, -2, 1);
  box.yaw = 0.7;
  PointCloud cloud;
  cloud.points = {box.center, box.center + Vec3(10, 0, 0)};
  const auto sets = points_in_boxes(cloud, {box});
  REQUIRE(sets.size() == 1);
  REQUIRE(sets[0] == std::vector<uint32_t>{0});
}

TEST_CASE("points exactly on faces count as inside on both paths") {
  OrientedBox box;
  box.width = 2.0;
  box.length = 4.0;
  box.height = 1.0;
  PointCloud cloud;
  cloud.points = {Vec3(1.0, 0.0, 0.0),   // +x face
                  Vec3(0.0, 2.0, 0.0),   // +y face
                  Vec3(0.0, 0.0, -0.5),  // -z face
                  Vec3(1.0, 2.0, 0.5)};  // corner
  const auto fast = points_in_boxes(cloud, {box});
  const auto brute = points_in_boxes_bruteforce(cloud, {box});
  REQUIRE(fast[0] == std::vector<uint32_t>{0, 1, 2, 3});
  REQUIRE(fast[0] == brute[0]);
}

TEST_CASE("circumsphere prefilter never drops inner points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const auto boxes = random_boxes(20, 5.0, 21);
  for (const OrientedBox& box : boxes) {
    const double r = box_circumradius(box);
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    for (int i = 0; i < 200; ++i) {
      const double lx = unit(rng) * box.width, ly = unit(rng) * box.length,
                   lz = unit(rng) * box.height;
      const Vec3 p = box.center + Vec3(c * lx - s * ly, s * lx + c * ly, lz);
      REQUIRE((p - box.center).norm() <= r * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("points_in_boxes equals the box-frame brute force on random scenes") {
  const PointCloud cloud = random_cloud(20000, 10.0, 1);
  const auto boxes = random_boxes(40, 10.0, 2);
  const auto fast = points_in_boxes(cloud, boxes);
  const auto brute = points_in_boxes_bruteforce(cloud, boxes);
  REQUIRE(fast.size() == brute.size());
  std::size_t nonempty = 0;
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    REQUIRE(fast[j] == brute[j]);
    nonempty += !fast[j].empty();
  }
  REQUIRE(nonempty > 0);  // the comparison must not be vacuous
}

TEST_CASE("parallel box queries give the same result") {
  const PointCloud cloud = random_cloud(5000, 8.0, 10);
  const auto boxes = random_boxes(25, 8.0, 11);
  const auto serial = points_in_boxes(cloud, boxes, nullptr, 1);
  const auto parallel = points_in_boxes(cloud, boxes, nullptr, 4);
  REQUIRE(serial == parallel);
}

TEST_CASE("empty cloud and empty box region") {
  const PointCloud empty;
  const auto boxes = random_boxes(3, 5.0, 4);
  const auto sets = points_in_boxes(empty, boxes);
  for (const auto& s : sets) REQUIRE(s.empty());
}

TEST_CASE("a prebuilt index is reusable across calls") {
  const PointCloud cloud = random_cloud(2000, 5.0, 77);
  const SpatialIndex index(cloud);
  const auto boxes_a = random_boxes(5, 5.0, 78);
  const auto boxes_b = random_boxes(5, 5.0, 79);
  REQUIRE(points_in_boxes(cloud, boxes_a, &index) == points_in_boxes(cloud, boxes_a));
  REQUIRE(points_in_boxes(cloud, boxes_b, &index) == points_in_boxes(cloud, boxes_b));
}
