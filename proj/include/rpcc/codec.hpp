#ifndef RPCC_CODEC_HPP
#define RPCC_CODEC_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rpcc/bitstream.hpp"
#include "rpcc/geometry.hpp"
#include "rpcc/heatmap.hpp"
#include "rpcc/parallel.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/transform.hpp"

namespace rpcc {

// Per-macroblock quantization parameters for one frame.
using QpMap = std::vector<uint8_t>;

inline void validate_qp_map(const QpMap& map) {
  for (uint8_t qp : map)
    if (qp > 51) throw std::invalid_argument("qp map entry out of [0, 51]");
}

// A macroblock is RoI iff at least one RoI point projects into it, counting
// points dropped by the nearest-wins resolution via their target pixel.
inline std::vector<uint8_t> solve_indicator(const RoiMask& mask, const ProjectionMaps& maps) {
  if (mask.size() != maps.point_to_pixel.size())
    throw std::invalid_argument("solve_indicator: mask not aligned to projection maps");
  std::vector<uint8_t> indicator(maps.macroblock_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const int64_t pixel = maps.point_to_pixel[i];
    if (pixel >= 0) indicator[macroblock_of_pixel(pixel, maps.image_width)] = 1;
  }
  return indicator;
}

inline QpMap build_qp_map(const std::vector<uint8_t>& indicator, int q_r, int q_b) {
  if (q_r < 0 || q_r > 51 || q_b < 0 || q_b > 51)
    throw std::invalid_argument("build_qp_map: QP out of [0, 51]");
  QpMap map(indicator.size());
  for (std::size_t i = 0; i < indicator.size(); ++i)
    map[i] = static_cast<uint8_t>(indicator[i] ? q_r : q_b);
  return map;
}

namespace detail {

// Unoccupied pixels take the mean depth of occupied pixels in the same
// macroblock, falling back to the frame-wide mean.
inline std::vector<uint16_t> pad_unoccupied(const DepthImage& img) {
  std::vector<uint16_t> padded(img.depth.begin(), img.depth.end());
  uint64_t global_sum = 0, global_count = 0;
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    if (img.occupancy[i]) {
      global_sum += img.depth[i];
      ++global_count;
    }
  }
  const uint16_t global_mean =
      global_count ? static_cast<uint16_t>(global_sum / global_count) : 0;
  const int mb_cols = img.width / 16, mb_rows = img.height / 16;
  for (int mb_row = 0; mb_row < mb_rows; ++mb_row) {
    for (int mb_col = 0; mb_col < mb_cols; ++mb_col) {
      uint64_t sum = 0, count = 0;
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
          const std::size_t pixel = std::size_t(mb_row * 16 + r) * img.width + mb_col * 16 + c;
          if (img.occupancy[pixel]) {
            sum += img.depth[pixel];
            ++count;
          }
        }
      const uint16_t fill = count ? static_cast<uint16_t>(sum / count) : global_mean;
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
          const std::size_t pixel = std::size_t(mb_row * 16 + r) * img.width + mb_col * 16 + c;
          if (!img.occupancy[pixel]) padded[pixel] = fill;
        }
    }
  }
  return padded;
}

constexpr int kLevelShift = 32768;  // keeps transform inputs in signed 16-bit range

inline std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= uint8_t(1) << (7 - i % 8);
  return out;
}

inline std::vector<uint8_t> unpack_bits(const std::vector<uint8_t>& bytes, std::size_t count) {
  std::vector<uint8_t> bits(count, 0);
  for (std::size_t i = 0; i < count; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return bits;
}

}  // namespace detail

struct EncodedFrame {
  std::vector<uint8_t> payload;
  DepthImage reconstruction;  // dequantized samples, all pixels
  uint32_t dropped_points = 0;
};

// Per macroblock: 16 4x4 blocks in raster order; forward transform and
// quantization at the macroblock's QP; zigzag + signed exp-Golomb over the
// coefficients; deflate over the whole frame payload. Occupancy and the
// point-to-pixel map are stored losslessly.
inline EncodedFrame encode_frame(const DepthImage& img, const QpMap& qp_map,
                                 const ProjectionMaps* maps = nullptr) {
  if (img.width % 16 != 0 || img.height % 16 != 0 || img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("encode_frame: dimensions must be positive multiples of 16");
  validate_qp_map(qp_map);
  const int mb_cols = img.width / 16, mb_rows = img.height / 16;
  if (qp_map.size() != std::size_t(mb_cols) * mb_rows)
    throw std::invalid_argument("encode_frame: qp map size mismatch");

  const std::vector<uint16_t> padded = detail::pad_unoccupied(img);

  EncodedFrame out;
  out.reconstruction = img;
  BitWriter coeffs;
  for (int mb_row = 0; mb_row < mb_rows; ++mb_row) {
    for (int mb_col = 0; mb_col < mb_cols; ++mb_col) {
      const int qp = qp_map[std::size_t(mb_row) * mb_cols + mb_col];
      for (int block = 0; block < 16; ++block) {
        const int base_r = mb_row * 16 + (block / 4) * 4;
        const int base_c = mb_col * 16 + (block % 4) * 4;
        Block4 x{};
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c)
            x[r * 4 + c] =
                int64_t(padded[std::size_t(base_r + r) * img.width + base_c + c]) -
                detail::kLevelShift;
        const Block4 z = quantize(dct4x4_forward(x), qp);
        for (int i = 0; i < 16; ++i) coeffs.put_se(z[kZigzag4x4[i]]);
        const Block4 recon = dequantize_and_inverse(z, qp);
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) {
            const int64_t v =
                std::clamp<int64_t>(recon[r * 4 + c] + detail::kLevelShift, 0, 65535);
            out.reconstruction.depth[std::size_t(base_r + r) * img.width + base_c + c] =
                static_cast<uint16_t>(v);
          }
      }
    }
  }

  ByteWriter segment;
  const std::vector<uint8_t> occupancy_raw = detail::pack_bits(img.occupancy);
  segment.put<uint64_t>(occupancy_raw.size());
  segment.put_blob(deflate_bytes(occupancy_raw));
  const std::vector<uint8_t> coeff_raw = coeffs.take();
  segment.put<uint64_t>(coeff_raw.size());
  segment.put_blob(deflate_bytes(coeff_raw));

  std::vector<uint8_t> p2p_raw;
  uint32_t point_count = 0;
  if (maps) {
    point_count = static_cast<uint32_t>(maps->point_to_pixel.size());
    out.dropped_points = static_cast<uint32_t>(maps->dropped.size());
    ByteWriter p2p;
    for (int64_t pixel : maps->point_to_pixel)
      p2p.put<uint32_t>(pixel < 0 ? 0xFFFFFFFFu : static_cast<uint32_t>(pixel));
    p2p_raw = std::move(p2p.bytes);
  }
  segment.put<uint32_t>(point_count);
  segment.put<uint64_t>(p2p_raw.size());
  segment.put_blob(p2p_raw.empty() ? std::vector<uint8_t>{} : deflate_bytes(p2p_raw));
  segment.put<uint32_t>(out.dropped_points);
  out.payload = std::move(segment.bytes);
  return out;
}

struct DecodedFrame {
  DepthImage image;
  std::vector<int64_t> point_to_pixel;
  uint32_t dropped_points = 0;
};

inline DecodedFrame decode_frame(const uint8_t* data, std::size_t size, const PlaneConfig& plane,
                                 const QpMap& qp_map, std::size_t base_offset = 0) {
  validate_qp_map(qp_map);
  const int mb_cols = plane.width / 16, mb_rows = plane.height / 16;
  if (qp_map.size() != std::size_t(mb_cols) * mb_rows)
    throw std::invalid_argument("decode_frame: qp map size mismatch");

  ByteReader reader{data, size};
  DecodedFrame out;
  DepthImage& img = out.image;
  img.width = plane.width;
  img.height = plane.height;
  img.plane = plane;

  const uint64_t occupancy_raw_size = reader.get<uint64_t>();
  const auto [occ_ptr, occ_len] = reader.get_blob();
  const auto occupancy_raw =
      inflate_bytes(occ_ptr, occ_len, occupancy_raw_size, base_offset + reader.pos);
  if (occupancy_raw_size != (img.pixels() + 7) / 8)
    throw ParseError("occupancy size mismatch", base_offset + reader.pos);
  img.occupancy = detail::unpack_bits(occupancy_raw, img.pixels());

  const uint64_t coeff_raw_size = reader.get<uint64_t>();
  const auto [coeff_ptr, coeff_len] = reader.get_blob();
  const auto coeff_raw =
      inflate_bytes(coeff_ptr, coeff_len, coeff_raw_size, base_offset + reader.pos);
  BitReader bits(coeff_raw.data(), coeff_raw.size(), base_offset + reader.pos);

  img.depth.assign(img.pixels(), 0);
  for (int mb_row = 0; mb_row < mb_rows; ++mb_row) {
    for (int mb_col = 0; mb_col < mb_cols; ++mb_col) {
      const int qp = qp_map[std::size_t(mb_row) * mb_cols + mb_col];
      for (int block = 0; block < 16; ++block) {
        Block4 z{};
        for (int i = 0; i < 16; ++i) z[kZigzag4x4[i]] = bits.get_se();
        const Block4 recon = dequantize_and_inverse(z, qp);
        const int base_r = mb_row * 16 + (block / 4) * 4;
        const int base_c = mb_col * 16 + (block % 4) * 4;
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) {
            const int64_t v =
                std::clamp<int64_t>(recon[r * 4 + c] + detail::kLevelShift, 0, 65535);
            img.depth[std::size_t(base_r + r) * img.width + base_c + c] =
                static_cast<uint16_t>(v);
          }
      }
    }
  }

  const uint32_t point_count = reader.get<uint32_t>();
  const uint64_t p2p_raw_size = reader.get<uint64_t>();
  const auto [p2p_ptr, p2p_len] = reader.get_blob();
  const auto p2p_raw = inflate_bytes(p2p_ptr, p2p_len, p2p_raw_size, base_offset + reader.pos);
  if (p2p_raw.size() != std::size_t(point_count) * 4)
    throw ParseError("point map size mismatch", base_offset + reader.pos);
  out.point_to_pixel.resize(point_count);
  ByteReader p2p{p2p_raw.data(), p2p_raw.size()};
  for (uint32_t i = 0; i < point_count; ++i) {
    const uint32_t v = p2p.get<uint32_t>();
    out.point_to_pixel[i] = v == 0xFFFFFFFFu ? -1 : int64_t(v);
  }
  out.dropped_points = reader.get<uint32_t>();
  if (reader.pos != reader.size)
    throw ParseError("trailing bytes after frame segment", base_offset + reader.pos);
  return out;
}

}  // namespace rpcc

#endif  // RPCC_CODEC_HPP
