#ifndef RPCC_TRANSFORM_HPP
#define RPCC_TRANSFORM_HPP

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>

namespace rpcc {

// 4x4 block of samples or coefficients, row-major.
using Block4 = std::array<int64_t, 16>;

// Core matrix of the 4x4 integer transform (H.264/AVC, Rec. ITU-T H.264):
//   W = C * X * C^T
inline constexpr std::array<std::array<int, 4>, 4> kCore = {{
    {1, 1, 1, 1}, {2, 1, -1, -2}, {1, -1, -1, 1}, {1, -2, 2, -1}}};

namespace detail {

// Coefficient position classes: 0 at (even,even), 1 at (odd,odd), 2 mixed.
inline constexpr int position_class(int row, int col) {
  if (row % 2 == 0 && col % 2 == 0) return 0;
  if (row % 2 == 1 && col % 2 == 1) return 1;
  return 2;
}

// Forward multiplier M and rescale V tables per QP mod 6, per position class
// (H.264 quantization tables; Rec. ITU-T H.264 §8.5).
inline constexpr std::array<std::array<int, 3>, 6> kQuantScale = {{
    {13107, 5243, 8066},
    {11916, 4660, 7490},
    {10082, 4194, 6554},
    {9362, 3647, 5825},
    {8192, 3355, 5243},
    {7282, 2893, 4559}}};
inline constexpr std::array<std::array<int, 3>, 6> kDequantScale = {{
    {10, 16, 13},
    {11, 18, 14},
    {13, 20, 16},
    {14, 23, 18},
    {16, 25, 20},
    {18, 29, 23}}};

inline void check_qp(int qp) {
  if (qp < 0 || qp > 51) throw std::invalid_argument("qp must be in [0, 51]");
}

}  // namespace detail

// Unscaled forward transform W = C X C^T, exact integer arithmetic.
inline Block4 dct4x4_forward(const Block4& block) {
  Block4 tmp{}, out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      int64_t acc = 0;
      for (int k = 0; k < 4; ++k) acc += int64_t(kCore[i][k]) * block[k * 4 + j];
      tmp[i * 4 + j] = acc;
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      int64_t acc = 0;
      for (int k = 0; k < 4; ++k) acc += tmp[i * 4 + k] * int64_t(kCore[j][k]);
      out[i * 4 + j] = acc;
    }
  return out;
}

// Z_ij = round(W_ij * M_ij / 2^(15 + qp/6)), round half away from zero.
inline Block4 quantize(const Block4& coeffs, int qp) {
  detail::check_qp(qp);
  const int qbits = 15 + qp / 6;
  const int64_t half = int64_t(1) << (qbits - 1);
  const auto& scale = detail::kQuantScale[qp % 6];
  Block4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int64_t w = coeffs[i * 4 + j];
      const int64_t m = scale[detail::position_class(i, j)];
      const int64_t mag = (std::abs(w) * m + half) >> qbits;
      out[i * 4 + j] = w < 0 ? -mag : mag;
    }
  return out;
}

inline Block4 dequantize(const Block4& levels, int qp) {
  detail::check_qp(qp);
  const auto& scale = detail::kDequantScale[qp % 6];
  const int shift = qp / 6;
  Block4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out[i * 4 + j] = (levels[i * 4 + j] * scale[detail::position_class(i, j)]) << shift;
  return out;
}

namespace detail {

inline void inverse_pass(const int64_t in0, const int64_t in1, const int64_t in2,
                         const int64_t in3, int64_t& out0, int64_t& out1, int64_t& out2,
                         int64_t& out3) {
  const int64_t e0 = in0 + in2;
  const int64_t e1 = in0 - in2;
  const int64_t e2 = (in1 >> 1) - in3;
  const int64_t e3 = in1 + (in3 >> 1);
  out0 = e0 + e3;
  out1 = e1 + e2;
  out2 = e1 - e2;
  out3 = e0 - e3;
}

}  // namespace detail

// Inverse core transform with the standard rounding shift (x + 32) >> 6.
inline Block4 dct4x4_inverse(const Block4& coeffs) {
  Block4 tmp{}, out{};
  for (int i = 0; i < 4; ++i)
    detail::inverse_pass(coeffs[i * 4 + 0], coeffs[i * 4 + 1], coeffs[i * 4 + 2],
                         coeffs[i * 4 + 3], tmp[i * 4 + 0], tmp[i * 4 + 1], tmp[i * 4 + 2],
                         tmp[i * 4 + 3]);
  for (int j = 0; j < 4; ++j) {
    int64_t a, b, c, d;
    detail::inverse_pass(tmp[0 * 4 + j], tmp[1 * 4 + j], tmp[2 * 4 + j], tmp[3 * 4 + j], a, b, c, d);
    out[0 * 4 + j] = (a + 32) >> 6;
    out[1 * 4 + j] = (b + 32) >> 6;
    out[2 * 4 + j] = (c + 32) >> 6;
    out[3 * 4 + j] = (d + 32) >> 6;
  }
  return out;
}

inline Block4 dequantize_and_inverse(const Block4& levels, int qp) {
  return dct4x4_inverse(dequantize(levels, qp));
}

}  // namespace rpcc

#endif  // RPCC_TRANSFORM_HPP
