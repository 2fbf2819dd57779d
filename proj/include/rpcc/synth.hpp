#ifndef RPCC_SYNTH_HPP
#define RPCC_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpcc/geometry.hpp"
#include "rpcc/gmm.hpp"
#include "rpcc/io.hpp"
#include "rpcc/manifest.hpp"

namespace rpcc {

struct SynthParams {
  uint64_t seed = 0;
  int frames = 1;
  int objects = 4;
  double extent = 40.0;        // ground half-size, meters
  int ground_points = 8000;
  double ground_noise = 0.02;  // sigma of ground z jitter
  double ground_slope_x = 0.0;
  double ground_slope_y = 0.0;
  int points_per_object = 800;
  int planted_components = 2;
  double spread = 0.8;         // planted sigma relative to the truncation half-range
  double speed = 0.5;          // ego translation per frame, +x, meters
  double yaw_rate = 0.0;       // ego yaw per frame, radians
  bool with_intensity = false;

  void validate() const {
    if (frames < 1 || objects < 0 || ground_points < 0 || points_per_object < 1 ||
        planted_components < 1 || extent <= 0.0 || spread <= 0.0)
      throw std::invalid_argument("synth: invalid scene parameters");
  }
};

struct SynthScene {
  std::vector<PointCloud> frames;               // ego-frame clouds with poses
  std::vector<std::vector<OrientedBox>> boxes;  // per frame, ego-frame
  std::vector<OrientedBox> world_boxes;
  std::vector<Gmm3> planted;                    // world frame, one per object
  RoiMask object_labels;                        // shared by all frames
};

namespace detail {

// Gaussian sample truncated to |x - mean| <= half_range per axis.
inline double truncated_normal(std::mt19937_64& rng, double mean, double sigma,
                               double half_range) {
  std::normal_distribution<double> dist(mean, sigma);
  for (int tries = 0; tries < 256; ++tries) {
    const double v = dist(rng);
    if (std::abs(v - mean) <= half_range) return v;
  }
  return mean;
}

}  // namespace detail

// Driving-like synthetic scene: a noisy ground plane plus box-labeled objects
// whose interiors are sampled from planted GMMs; the ego moves along a
// straight trajectory and every frame re-expresses the same world geometry in
// the ego frame.
inline SynthScene generate_scene(const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(splitmix64(params.seed ^ 0x5ce7e5u));

  SynthScene scene;
  auto ground_z = [&](double x, double y) {
    return params.ground_slope_x * x + params.ground_slope_y * y;
  };

  // world boxes, min 8 m apart, clear of the ego track
  std::uniform_real_distribution<double> pos(-0.7 * params.extent, 0.7 * params.extent);
  std::uniform_real_distribution<double> yaw_dist(-M_PI, M_PI);
  std::uniform_real_distribution<double> w_dist(1.7, 2.1), l_dist(4.2, 4.8), h_dist(1.5, 1.7);
  for (int j = 0; j < params.objects; ++j) {
    OrientedBox box;
    for (int tries = 0; tries < 256; ++tries) {
      box.center = Vec3(pos(rng), pos(rng), 0.0);
      bool ok = std::abs(box.center.y()) > 3.0;  // keep off the ego track
      for (const OrientedBox& other : scene.world_boxes)
        if ((other.center - box.center).head<2>().norm() < 8.0) ok = false;
      if (ok) break;
    }
    box.width = w_dist(rng);
    box.length = l_dist(rng);
    box.height = h_dist(rng);
    box.yaw = yaw_dist(rng);
    box.class_id = j % 2;
    box.center.z() = ground_z(box.center.x(), box.center.y()) + 0.25 + 0.5 * box.height;
    scene.world_boxes.push_back(box);
  }

  // world points: ground first, then the object clusters
  std::vector<Vec3> world_points;
  std::uniform_real_distribution<double> ground_xy(-params.extent, params.extent);
  std::normal_distribution<double> ground_jitter(0.0, params.ground_noise);
  for (int i = 0; i < params.ground_points; ++i) {
    const double x = ground_xy(rng), y = ground_xy(rng);
    world_points.emplace_back(x, y, ground_z(x, y) + ground_jitter(rng));
  }
  scene.object_labels.assign(world_points.size(), 0);

  for (const OrientedBox& box : scene.world_boxes) {
    const int k = params.planted_components;
    const double margin = 0.5 * box.height - 0.1;  // keeps points clear of the ground band
    Gmm3 planted;
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const Mat3 rot = (Mat3() << c, -s, 0, s, c, 0, 0, 0, 1).finished();
    std::vector<Vec3> local_means(k);
    std::vector<Vec3> local_sigmas(k);
    std::vector<Vec3> half_ranges(k);
    for (int comp = 0; comp < k; ++comp) {
      // components spaced along the box length, each truncated symmetrically;
      // the 0.4 factor leaves a gap between supports so the planted means
      // stay identifiable
      const double slot = box.length / k;
      const double y_mean = -0.5 * box.length + (comp + 0.5) * slot;
      local_means[comp] = Vec3(0.0, y_mean, 0.0);
      half_ranges[comp] = Vec3(0.5 * box.width, 0.4 * slot, margin);
      local_sigmas[comp] = params.spread * half_ranges[comp];
      planted.means.push_back(box.center + rot * local_means[comp]);
      const Mat3 local_cov = local_sigmas[comp].cwiseAbs2().asDiagonal();
      planted.covariances.push_back(rot * local_cov * rot.transpose());
    }
    scene.planted.push_back(planted);

    const int per_comp = params.points_per_object / k;
    for (int comp = 0; comp < k; ++comp) {
      const int count = comp == k - 1 ? params.points_per_object - per_comp * (k - 1) : per_comp;
      for (int i = 0; i < count; ++i) {
        Vec3 local;
        for (int axis = 0; axis < 3; ++axis)
          local[axis] = detail::truncated_normal(rng, local_means[comp][axis],
                                                 local_sigmas[comp][axis],
                                                 half_ranges[comp][axis]);
        world_points.push_back(box.center + rot * local);
        scene.object_labels.push_back(1);
      }
    }
  }

  // frames: same world points re-expressed in each ego frame
  for (int t = 0; t < params.frames; ++t) {
    Pose pose;
    const double yaw = params.yaw_rate * t;
    pose.rotation = (Mat3() << std::cos(yaw), -std::sin(yaw), 0, std::sin(yaw), std::cos(yaw), 0,
                     0, 0, 1)
                        .finished();
    pose.translation = Vec3(params.speed * t, 0.0, 0.0);
    const Pose world_to_ego = pose.inverse();

    PointCloud cloud;
    cloud.frame_index = static_cast<uint32_t>(t);
    cloud.pose = pose;
    cloud.points.reserve(world_points.size());
    for (const Vec3& p : world_points) cloud.points.push_back(world_to_ego.apply(p));
    if (params.with_intensity) {
      cloud.intensity.resize(cloud.size());
      for (std::size_t i = 0; i < cloud.size(); ++i)
        cloud.intensity[i] = scene.object_labels[i] ? 0.8f : 0.2f;
    }
    scene.frames.push_back(std::move(cloud));

    std::vector<OrientedBox> ego_boxes;
    for (const OrientedBox& box : scene.world_boxes) {
      OrientedBox ego_box = box;
      ego_box.center = world_to_ego.apply(box.center);
      ego_box.yaw = std::remainder(box.yaw - yaw, 2.0 * M_PI);
      ego_boxes.push_back(ego_box);
    }
    scene.boxes.push_back(std::move(ego_boxes));
  }
  return scene;
}

// Writes clouds, per-frame boxes, the construction labels, and a manifest.
inline SceneManifest write_scene(const std::filesystem::path& dir, const SynthScene& scene,
                                 const std::string& sequence_id, double frame_rate = 20.0) {
  std::filesystem::create_directories(dir);
  SceneManifest manifest;
  manifest.sequence_id = sequence_id;
  manifest.frame_rate = frame_rate;
  manifest.base_dir = dir;
  for (std::size_t t = 0; t < scene.frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu", t);
    FrameEntry entry;
    entry.frame_index = scene.frames[t].frame_index;
    entry.cloud_path = std::string(name) + ".pcb";
    entry.boxes_path = std::string(name) + ".boxes.json";
    entry.pose = scene.frames[t].pose;
    io::write_cloud_binary(dir / entry.cloud_path, scene.frames[t]);
    io::write_boxes_json(dir / entry.boxes_path, scene.boxes[t]);
    manifest.frames.push_back(std::move(entry));
  }
  io::write_mask_rle(dir / "object_labels.rlm", scene.object_labels);
  io::write_manifest(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace rpcc

#endif  // RPCC_SYNTH_HPP
