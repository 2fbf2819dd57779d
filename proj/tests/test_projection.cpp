#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rpcc/projection.hpp"

using namespace rpcc;

namespace {

PlaneConfig small_plane() {
  PlaneConfig plane = PlaneConfig::birds_eye(64, 64, 0.25, 2.0);
  return plane;  // footprint [-8, 8)^2, depth range z in [-2, ~100]
}

}  // namespace

TEST_CASE("plane validation rejects bad dimensions and skewed axes") {
  PlaneConfig plane = small_plane();
  REQUIRE_NOTHROW(plane.validate());
  plane.width = 60;
  REQUIRE_THROWS_AS(plane.validate(), std::invalid_argument);
  plane = small_plane();
  plane.u_axis = Vec3(1, 0.1, 0).normalized();
  REQUIRE_THROWS_AS(plane.validate(), std::invalid_argument);
}

TEST_CASE("a single point at the plane origin lands on pixel zero with depth zero") {
  PlaneConfig plane = small_plane();
  PointCloud cloud;
  cloud.points = {plane.origin};
  const ProjectionResult result = project(cloud, plane);
  REQUIRE(result.image.occupancy[0] == 1);
  REQUIRE(result.image.depth[0] == 0);
  std::size_t occupied = 0;
  for (uint8_t o : result.image.occupancy) occupied += o;
  REQUIRE(occupied == 1);
  REQUIRE(result.maps.point_to_pixel[0] == 0);
  REQUIRE(result.maps.dropped.empty());
}

TEST_CASE("nearest point wins a contested pixel and the loser is dropped") {
  PlaneConfig plane = small_plane();
  PointCloud cloud;
  cloud.points = {plane.origin + Vec3(0.1, 0.1, 2.0), plane.origin + Vec3(0.1, 0.1, 1.0)};
  const ProjectionResult result = project(cloud, plane);
  REQUIRE(result.maps.dropped == std::vector<uint32_t>{0});
  REQUIRE(result.maps.point_to_pixel[0] == result.maps.point_to_pixel[1]);
  const int64_t pixel = result.maps.point_to_pixel[1];
  const double meters = plane.depth_offset + result.image.depth[pixel] * plane.depth_scale;
  REQUIRE(meters == Catch::Approx(1.0).margin(plane.depth_scale));
}

TEST_CASE("out-of-footprint points are dropped but keep no pixel") {
  PlaneConfig plane = small_plane();
  PointCloud cloud;
  cloud.points = {plane.origin + Vec3(1.0, 1.0, 1.0), plane.origin + Vec3(100.0, 0.0, 1.0)};
  const ProjectionResult result = project(cloud, plane);
  REQUIRE(result.maps.point_to_pixel[1] == -1);
  REQUIRE(result.maps.dropped == std::vector<uint32_t>{1});
}

TEST_CASE("a cloud entirely outside the footprint is an error") {
  PlaneConfig plane = small_plane();
  PointCloud cloud;
  cloud.points = {plane.origin + Vec3(-5.0, 0.0, 1.0)};  // negative u
  REQUIRE_THROWS_AS(project(cloud, plane), std::invalid_argument);
  REQUIRE_THROWS_AS(project(PointCloud{}, plane), std::invalid_argument);
}

TEST_CASE("projection round trip stays within half a pixel and half a depth quantum") {
  PlaneConfig plane = small_plane();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xy(-7.5, 7.5);
  std::uniform_real_distribution<double> z(-1.5, 3.0);
  PointCloud cloud;
  for (int i = 0; i < 4000; ++i) cloud.points.emplace_back(xy(rng), xy(rng), z(rng));

  const ProjectionResult result = project(cloud, plane);
  const PointCloud recon = reconstruct(result.image);

  // map each surviving point to its reconstructed pixel point
  std::vector<int64_t> pixel_to_recon(result.image.pixels(), -1);
  int64_t count = 0;
  for (std::size_t pixel = 0; pixel < result.image.pixels(); ++pixel)
    if (result.image.occupancy[pixel]) pixel_to_recon[pixel] = count++;
  REQUIRE(std::size_t(count) == recon.size());

  std::vector<bool> dropped(cloud.size(), false);
  for (uint32_t d : result.maps.dropped) dropped[d] = true;
  const double half_pitch = 0.5 * plane.pixel_pitch + 1e-12;
  const double half_quantum = 0.5 * plane.depth_scale + 1e-12;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (dropped[i]) continue;
    const Vec3 rp = recon.points[pixel_to_recon[result.maps.point_to_pixel[i]]];
    REQUIRE(std::abs(rp.x() - cloud.points[i].x()) <= half_pitch);
    REQUIRE(std::abs(rp.y() - cloud.points[i].y()) <= half_pitch);
    REQUIRE(std::abs(rp.z() - cloud.points[i].z()) <= half_quantum);
  }
}

TEST_CASE("grid-aligned points reconstruct exactly") {
  PlaneConfig plane = small_plane();
  PointCloud cloud;
  for (int row = 4; row < 12; ++row)
    for (int col = 4; col < 12; ++col) {
      const double u = (col + 0.5) * plane.pixel_pitch;
      const double v = (row + 0.5) * plane.pixel_pitch;
      const double depth = plane.depth_offset + (row * 64 + col) * 7 * plane.depth_scale;
      cloud.points.push_back(plane.origin + u * plane.u_axis + v * plane.v_axis +
                             depth * plane.depth_axis);
    }
  const ProjectionResult result = project(cloud, plane);
  const PointCloud recon = reconstruct(result.image);
  REQUIRE(recon.size() == cloud.size());
  // reconstruct emits raster order; the construction above is raster-ordered
  for (std::size_t i = 0; i < cloud.size(); ++i)
    REQUIRE((recon.points[i] - cloud.points[i]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("empty occupancy reconstructs an empty cloud") {
  DepthImage img;
  img.width = img.height = 64;
  img.plane = small_plane();
  img.depth.assign(img.pixels(), 0);
  img.occupancy.assign(img.pixels(), 0);
  REQUIRE(reconstruct(img).empty());
}

TEST_CASE("macroblock tiling maps pixels to 16x16 tiles") {
  REQUIRE(macroblock_of_pixel(0, 64) == 0);
  REQUIRE(macroblock_of_pixel(15, 64) == 0);
  REQUIRE(macroblock_of_pixel(16, 64) == 1);
  REQUIRE(macroblock_of_pixel(16 * 64, 64) == 4);  // row 16 starts the second tile row
}
