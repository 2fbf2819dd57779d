#ifndef RPCC_SEQUENCE_HPP
#define RPCC_SEQUENCE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rpcc/codec.hpp"

namespace rpcc {

constexpr uint16_t kContainerVersion = 1;
inline constexpr char kContainerMagic[4] = {'R', 'P', 'C', 'C'};

struct SequenceStats {
  uint64_t total_bits = 0;
  std::vector<uint64_t> frame_bits;
  std::vector<uint32_t> dropped_points;
  std::vector<uint32_t> roi_macroblocks;
};

struct EncodedSequence {
  std::vector<uint8_t> bytes;
  SequenceStats stats;
};

namespace detail {

inline void write_plane(ByteWriter& w, const PlaneConfig& plane) {
  for (const Vec3* v : {&plane.origin, &plane.u_axis, &plane.v_axis, &plane.depth_axis})
    for (int i = 0; i < 3; ++i) w.put<double>((*v)[i]);
  w.put<double>(plane.pixel_pitch);
  w.put<uint32_t>(static_cast<uint32_t>(plane.width));
  w.put<uint32_t>(static_cast<uint32_t>(plane.height));
  w.put<double>(plane.depth_scale);
  w.put<double>(plane.depth_offset);
}

inline PlaneConfig read_plane(ByteReader& r) {
  PlaneConfig plane;
  for (Vec3* v : {&plane.origin, &plane.u_axis, &plane.v_axis, &plane.depth_axis})
    for (int i = 0; i < 3; ++i) (*v)[i] = r.get<double>();
  plane.pixel_pitch = r.get<double>();
  plane.width = static_cast<int>(r.get<uint32_t>());
  plane.height = static_cast<int>(r.get<uint32_t>());
  plane.depth_scale = r.get<double>();
  plane.depth_offset = r.get<double>();
  return plane;
}

}  // namespace detail

// Per frame: project, derive the macroblock QP map from the RoI mask (or a
// uniform q_b map when no masks are supplied), and encode. The container
// holds the plane config and all QP maps up front, then length-prefixed
// frame segments.
inline EncodedSequence encode_sequence(const std::vector<PointCloud>& clouds,
                                       const std::vector<RoiMask>* masks, int q_r, int q_b,
                                       const PlaneConfig& plane, int workers = 1) {
  if (clouds.empty()) throw std::invalid_argument("encode_sequence: no frames");
  if (masks && masks->size() != clouds.size())
    throw std::invalid_argument("encode_sequence: mask count does not match frame count");
  plane.validate();
  const int mb_count = (plane.width / 16) * (plane.height / 16);

  struct FrameOut {
    EncodedFrame frame;
    QpMap qp_map;
    uint32_t roi_mbs = 0;
  };
  std::vector<FrameOut> outs(clouds.size());
  parallel_for(clouds.size(), workers, [&](std::size_t t) {
    const ProjectionResult proj = project(clouds[t], plane);
    std::vector<uint8_t> indicator(mb_count, 0);
    if (masks) indicator = solve_indicator((*masks)[t], proj.maps);
    FrameOut& out = outs[t];
    out.qp_map = build_qp_map(indicator, masks ? q_r : q_b, q_b);
    for (uint8_t bit : indicator) out.roi_mbs += bit;
    out.frame = encode_frame(proj.image, out.qp_map, &proj.maps);
  });

  ByteWriter w;
  w.bytes.insert(w.bytes.end(), kContainerMagic, kContainerMagic + 4);
  w.put<uint16_t>(kContainerVersion);
  detail::write_plane(w, plane);
  w.put<uint32_t>(static_cast<uint32_t>(clouds.size()));
  for (const FrameOut& out : outs)
    w.bytes.insert(w.bytes.end(), out.qp_map.begin(), out.qp_map.end());

  EncodedSequence seq;
  for (FrameOut& out : outs) {
    seq.stats.frame_bits.push_back(uint64_t(out.frame.payload.size()) * 8);
    seq.stats.dropped_points.push_back(out.frame.dropped_points);
    seq.stats.roi_macroblocks.push_back(out.roi_mbs);
    w.put_blob(out.frame.payload);
  }
  seq.bytes = std::move(w.bytes);
  seq.stats.total_bits = uint64_t(seq.bytes.size()) * 8;
  return seq;
}

struct DecodedSequence {
  PlaneConfig plane;
  std::vector<QpMap> qp_maps;
  std::vector<DepthImage> frames;
  std::vector<std::vector<int64_t>> point_to_pixel;
  std::vector<uint32_t> dropped_points;
};

inline DecodedSequence decode_sequence(const std::vector<uint8_t>& bytes) {
  ByteReader r{bytes.data(), bytes.size()};
  for (char c : kContainerMagic)
    if (r.get<char>() != c) throw ParseError("bad container magic", r.pos - 1);
  const uint16_t version = r.get<uint16_t>();
  if (version != kContainerVersion) throw ParseError("unsupported container version", r.pos - 2);

  DecodedSequence seq;
  seq.plane = detail::read_plane(r);
  try {
    seq.plane.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), r.pos);
  }
  const uint32_t frame_count = r.get<uint32_t>();
  const std::size_t mb_count = std::size_t(seq.plane.width / 16) * (seq.plane.height / 16);
  // every frame needs a full QP map before the segments start
  if (std::size_t(frame_count) * mb_count > r.size - r.pos)
    throw ParseError("frame count exceeds the remaining stream", r.pos - 4);
  seq.qp_maps.resize(frame_count);
  for (uint32_t t = 0; t < frame_count; ++t) {
    seq.qp_maps[t].resize(mb_count);
    for (std::size_t i = 0; i < mb_count; ++i) seq.qp_maps[t][i] = r.get<uint8_t>();
    try {
      validate_qp_map(seq.qp_maps[t]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), r.pos);
    }
  }
  for (uint32_t t = 0; t < frame_count; ++t) {
    const std::size_t segment_start = r.pos;
    const auto [ptr, len] = r.get_blob();
    DecodedFrame frame = decode_frame(ptr, len, seq.plane, seq.qp_maps[t], segment_start + 8);
    seq.frames.push_back(std::move(frame.image));
    seq.point_to_pixel.push_back(std::move(frame.point_to_pixel));
    seq.dropped_points.push_back(frame.dropped_points);
  }
  if (r.pos != r.size) throw ParseError("trailing bytes after last frame", r.pos);
  return seq;
}

}  // namespace rpcc

#endif  // RPCC_SEQUENCE_HPP
