#ifndef RPCC_MANIFEST_HPP
#define RPCC_MANIFEST_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpcc/geometry.hpp"
#include "rpcc/io.hpp"

namespace rpcc {

struct FrameEntry {
  uint32_t frame_index = 0;
  std::string cloud_path;          // relative to the manifest directory
  std::string boxes_path;          // may be empty
  Pose pose;
};

struct SceneManifest {
  std::string sequence_id;
  double frame_rate = 20.0;
  std::vector<FrameEntry> frames;
  std::filesystem::path base_dir;  // set on load; not serialized

  std::filesystem::path resolve(const std::string& relative) const {
    return base_dir / relative;
  }
};

namespace io {

inline void write_manifest(const std::filesystem::path& path, const SceneManifest& manifest) {
  nlohmann::json frames = nlohmann::json::array();
  for (const FrameEntry& f : manifest.frames) {
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot[r * 3 + c] = f.pose.rotation(r, c);
    frames.push_back({{"frame_index", f.frame_index},
                      {"cloud", f.cloud_path},
                      {"boxes", f.boxes_path},
                      {"pose",
                       {{"rotation", rot},
                        {"translation",
                         {f.pose.translation.x(), f.pose.translation.y(),
                          f.pose.translation.z()}}}}});
  }
  const nlohmann::json j = {{"sequence_id", manifest.sequence_id},
                            {"frame_rate", manifest.frame_rate},
                            {"frames", frames}};
  atomic_write(path, j.dump(2) + "\n");
}

inline SceneManifest read_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  SceneManifest manifest;
  manifest.base_dir = path.parent_path();
  try {
    manifest.sequence_id = j.at("sequence_id");
    manifest.frame_rate = j.value("frame_rate", 20.0);
    for (const auto& item : j.at("frames")) {
      FrameEntry f;
      f.frame_index = item.at("frame_index");
      f.cloud_path = item.at("cloud");
      f.boxes_path = item.value("boxes", "");
      const auto& rot = item.at("pose").at("rotation");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) f.pose.rotation(r, c) = rot.at(r * 3 + c);
      const auto& t = item.at("pose").at("translation");
      f.pose.translation = Vec3(t.at(0), t.at(1), t.at(2));
      manifest.frames.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  if (!(manifest.frame_rate > 0.0))
    throw IoError("manifest frame_rate must be positive: " + path.string());
  for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
    try {
      manifest.frames[i].pose.validate();
    } catch (const std::invalid_argument& e) {
      throw IoError("frame " + std::to_string(i) + " in " + path.string() + ": " + e.what());
    }
    if (i > 0 && manifest.frames[i].frame_index <= manifest.frames[i - 1].frame_index)
      throw IoError("frames must be ordered by frame_index: " + path.string());
  }
  return manifest;
}

}  // namespace io
}  // namespace rpcc

#endif  // RPCC_MANIFEST_HPP
