#ifndef RPCC_IO_HPP
#define RPCC_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpcc/geometry.hpp"
#include "rpcc/heatmap.hpp"

namespace rpcc {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

inline std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// temp + rename so readers never observe a partial file
inline void atomic_write(const std::filesystem::path& path, const void* data, std::size_t size) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void atomic_write(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
  atomic_write(path, bytes.data(), bytes.size());
}

inline void atomic_write(const std::filesystem::path& path, const std::string& text) {
  atomic_write(path, text.data(), text.size());
}

// --- point clouds -----------------------------------------------------------
//
// Binary format: u32 point count, u8 intensity flag, then per point
// x, y, z as little-endian f32 (plus intensity f32 when flagged).

inline void write_cloud_binary(const std::filesystem::path& path, const PointCloud& cloud) {
  cloud.validate();
  std::vector<uint8_t> bytes;
  const uint32_t n = static_cast<uint32_t>(cloud.size());
  const uint8_t flag = cloud.has_intensity() ? 1 : 0;
  bytes.reserve(5 + std::size_t(n) * (flag ? 16 : 12));
  auto put = [&](const void* p, std::size_t len) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + len);
  };
  put(&n, 4);
  put(&flag, 1);
  for (uint32_t i = 0; i < n; ++i) {
    const float xyz[3] = {float(cloud.points[i].x()), float(cloud.points[i].y()),
                          float(cloud.points[i].z())};
    put(xyz, 12);
    if (flag) put(&cloud.intensity[i], 4);
  }
  atomic_write(path, bytes);
}

inline PointCloud read_cloud_binary(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 5) throw IoError("truncated point cloud file " + path.string());
  uint32_t n;
  std::memcpy(&n, bytes.data(), 4);
  const uint8_t flag = bytes[4];
  const std::size_t record = flag ? 16 : 12;
  if (bytes.size() != 5 + std::size_t(n) * record)
    throw IoError("point cloud size mismatch in " + path.string());
  PointCloud cloud;
  cloud.points.resize(n);
  if (flag) cloud.intensity.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    float xyz[3];
    std::memcpy(xyz, bytes.data() + 5 + i * record, 12);
    cloud.points[i] = Vec3(xyz[0], xyz[1], xyz[2]);
    if (flag) std::memcpy(&cloud.intensity[i], bytes.data() + 5 + i * record + 12, 4);
  }
  return cloud;
}

inline void write_cloud_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  cloud.validate();
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n";
  if (cloud.has_intensity()) out << "property float intensity\n";
  out << "end_header\n";
  out.precision(9);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << float(cloud.points[i].x()) << ' ' << float(cloud.points[i].y()) << ' '
        << float(cloud.points[i].z());
    if (cloud.has_intensity()) out << ' ' << cloud.intensity[i];
    out << '\n';
  }
  atomic_write(path, out.str());
}

inline PointCloud read_cloud_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t vertex_count = 0;
  bool has_intensity = false;
  bool header_done = false;
  std::vector<std::string> properties;
  if (!std::getline(in, line) || line != "ply") throw IoError("not a PLY file: " + path.string());
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    if (token == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw IoError("only ascii PLY is supported: " + path.string());
    } else if (token == "element") {
      std::string name;
      ls >> name >> vertex_count;
      if (name != "vertex") throw IoError("unsupported PLY element in " + path.string());
    } else if (token == "property") {
      std::string type, name;
      ls >> type >> name;
      properties.push_back(name);
      if (name == "intensity") has_intensity = true;
    } else if (token == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw IoError("PLY header not terminated in " + path.string());
  PointCloud cloud;
  cloud.points.resize(vertex_count);
  if (has_intensity) cloud.intensity.resize(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) throw IoError("PLY vertex list truncated in " + path.string());
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) throw IoError("malformed PLY vertex in " + path.string());
    cloud.points[i] = Vec3(x, y, z);
    if (has_intensity) {
      float v;
      if (!(ls >> v)) throw IoError("malformed PLY intensity in " + path.string());
      cloud.intensity[i] = v;
    }
  }
  return cloud;
}

// --- boxes -------------------------------------------------------------------
// JSON array of {center:[x,y,z], size:[w,l,h], yaw, class_id}.

inline void write_boxes_json(const std::filesystem::path& path,
                             const std::vector<OrientedBox>& boxes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const OrientedBox& box : boxes) {
    arr.push_back({{"center", {box.center.x(), box.center.y(), box.center.z()}},
                   {"size", {box.width, box.length, box.height}},
                   {"yaw", box.yaw},
                   {"class_id", box.class_id}});
  }
  atomic_write(path, arr.dump(2) + "\n");
}

inline std::vector<OrientedBox> read_boxes_json(const std::filesystem::path& path) {
  nlohmann::json arr;
  try {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed boxes JSON in " + path.string() + ": " + e.what());
  }
  if (!arr.is_array()) throw IoError("boxes JSON must be an array: " + path.string());
  std::vector<OrientedBox> boxes;
  for (const auto& item : arr) {
    try {
      OrientedBox box;
      box.center = Vec3(item.at("center").at(0), item.at("center").at(1), item.at("center").at(2));
      box.width = item.at("size").at(0);
      box.length = item.at("size").at(1);
      box.height = item.at("size").at(2);
      box.yaw = item.at("yaw");
      box.class_id = item.at("class_id");
      if (box.degenerate())
        throw IoError("degenerate box (dimension <= 1e-6 m) in " + path.string());
      if (box.yaw < -M_PI || box.yaw > M_PI)
        throw IoError("box yaw outside [-pi, pi] in " + path.string());
      if (box.class_id < 0) throw IoError("negative class_id in " + path.string());
      boxes.push_back(box);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed box entry in " + path.string() + ": " + e.what());
    }
  }
  return boxes;
}

// --- masks -------------------------------------------------------------------
// Run-length encoded sidecar: magic "RLM1", u64 bit count, then LEB128 run
// lengths alternating value starting with zeros.

inline void write_mask_rle(const std::filesystem::path& path, const RoiMask& mask) {
  std::vector<uint8_t> bytes = {'R', 'L', 'M', '1'};
  const uint64_t n = mask.size();
  for (int i = 0; i < 8; ++i) bytes.push_back(uint8_t(n >> (8 * i)));
  auto put_varint = [&](uint64_t v) {
    while (v >= 0x80) {
      bytes.push_back(uint8_t(v) | 0x80);
      v >>= 7;
    }
    bytes.push_back(uint8_t(v));
  };
  uint8_t current = 0;
  uint64_t run = 0;
  for (uint8_t bit : mask) {
    if ((bit != 0) == (current != 0)) {
      ++run;
    } else {
      put_varint(run);
      current = bit;
      run = 1;
    }
  }
  if (n > 0) put_varint(run);
  atomic_write(path, bytes);
}

inline RoiMask read_mask_rle(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 12 || bytes[0] != 'R' || bytes[1] != 'L' || bytes[2] != 'M' ||
      bytes[3] != '1')
    throw IoError("not a mask file: " + path.string());
  uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= uint64_t(bytes[4 + i]) << (8 * i);
  std::size_t pos = 12;
  auto get_varint = [&]() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (pos >= bytes.size()) throw IoError("truncated mask file: " + path.string());
      const uint8_t b = bytes[pos++];
      v |= uint64_t(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
      shift += 7;
    }
  };
  RoiMask mask;
  mask.reserve(n);
  uint8_t current = 0;
  while (mask.size() < n) {
    const uint64_t run = get_varint();
    if (mask.size() + run > n) throw IoError("mask runs exceed bit count: " + path.string());
    mask.insert(mask.end(), run, current);
    current ^= 1;
  }
  if (pos != bytes.size()) throw IoError("trailing bytes in mask file: " + path.string());
  return mask;
}

// --- heatmaps ----------------------------------------------------------------
// One 16-bit PGM per class channel (value = round(65535 * Y)), plus a JSON
// geometry header shared by the channels.

inline void write_heatmap_pgm(const std::filesystem::path& path,
                              const std::vector<double>& channel, const GridGeometry& geom) {
  std::vector<uint8_t> bytes;
  const std::string header =
      "P5\n" + std::to_string(geom.width) + " " + std::to_string(geom.height) + "\n65535\n";
  bytes.insert(bytes.end(), header.begin(), header.end());
  for (double v : channel) {
    const auto q = static_cast<uint16_t>(std::llround(65535.0 * v));
    bytes.push_back(uint8_t(q >> 8));  // PGM maxval > 255 is big-endian
    bytes.push_back(uint8_t(q & 0xFF));
  }
  atomic_write(path, bytes);
}

inline void write_grid_geometry_json(const std::filesystem::path& path, const GridGeometry& geom,
                                     int num_classes) {
  const nlohmann::json j = {{"origin", {geom.origin_x, geom.origin_y}},
                            {"cell_size", geom.cell_size},
                            {"width", geom.width},
                            {"height", geom.height},
                            {"channels", num_classes}};
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace io
}  // namespace rpcc

#endif  // RPCC_IO_HPP
