#ifndef RPCC_BITSTREAM_HPP
#define RPCC_BITSTREAM_HPP

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace rpcc {

// Malformed-stream error carrying the byte offset of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// MSB-first bit writer.
class BitWriter {
 public:
  void put_bit(int bit) {
    if (shift_ == 0) {
      bytes_.push_back(0);
      shift_ = 8;
    }
    --shift_;
    if (bit) bytes_.back() |= uint8_t(1) << shift_;
  }

  void put_bits(uint64_t value, int count) {
    for (int i = count - 1; i >= 0; --i) put_bit((value >> i) & 1);
  }

  // Exp-Golomb, unsigned.
  void put_ue(uint64_t value) {
    const uint64_t v = value + 1;
    const int bits = std::bit_width(v);
    for (int i = 0; i < bits - 1; ++i) put_bit(0);
    put_bits(v, bits);
  }

  // Exp-Golomb, signed: 0, 1, -1, 2, -2, ...
  void put_se(int64_t value) {
    put_ue(value > 0 ? uint64_t(value) * 2 - 1 : uint64_t(-value) * 2);
  }

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<uint8_t> bytes_;
  int shift_ = 0;
};

class BitReader {
 public:
  BitReader(const uint8_t* data, std::size_t size, std::size_t base_offset = 0)
      : data_(data), size_(size), base_offset_(base_offset) {}

  int get_bit() {
    if (pos_ >= size_ * 8) throw ParseError("bitstream truncated", base_offset_ + pos_ / 8);
    const int bit = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return bit;
  }

  uint64_t get_bits(int count) {
    uint64_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | uint64_t(get_bit());
    return v;
  }

  uint64_t get_ue() {
    int zeros = 0;
    while (get_bit() == 0) {
      if (++zeros > 63) throw ParseError("exp-golomb prefix too long", base_offset_ + pos_ / 8);
    }
    const uint64_t v = (uint64_t(1) << zeros) | get_bits(zeros);
    return v - 1;
  }

  int64_t get_se() {
    const uint64_t u = get_ue();
    return (u % 2 == 1) ? int64_t((u + 1) / 2) : -int64_t(u / 2);
  }

 private:
  const uint8_t* data_;
  std::size_t size_;
  std::size_t base_offset_;
  std::size_t pos_ = 0;
};

// Zigzag scan order of a 4x4 block.
inline constexpr std::array<int, 16> kZigzag4x4 = {0, 1,  4,  8,  5, 2,  3,  6,
                                                   9, 12, 13, 10, 7, 11, 14, 15};

inline std::vector<uint8_t> deflate_bytes(const std::vector<uint8_t>& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> out(bound);
  const int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw std::runtime_error("deflate failed");
  out.resize(bound);
  return out;
}

inline std::vector<uint8_t> inflate_bytes(const uint8_t* data, std::size_t size,
                                          std::size_t raw_size, std::size_t err_offset = 0) {
  std::vector<uint8_t> out(raw_size);
  if (raw_size == 0) {
    if (size != 0) throw ParseError("inflate failed: unexpected payload", err_offset);
    return out;
  }
  uLongf got = static_cast<uLongf>(raw_size);
  const int rc = uncompress(out.data(), &got, data, static_cast<uLong>(size));
  if (rc != Z_OK || got != raw_size) throw ParseError("inflate failed", err_offset);
  return out;
}

// Little-endian scalar serialization.
struct ByteWriter {
  std::vector<uint8_t> bytes;

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    bytes.insert(bytes.end(), buf, buf + sizeof(T));
  }
  void put_blob(const std::vector<uint8_t>& blob) {
    put<uint64_t>(blob.size());
    bytes.insert(bytes.end(), blob.begin(), blob.end());
  }
};

struct ByteReader {
  const uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos + sizeof(T) > size) throw ParseError("container truncated", pos);
    T value;
    std::memcpy(&value, data + pos, sizeof(T));
    pos += sizeof(T);
    return value;
  }
  std::pair<const uint8_t*, std::size_t> get_blob() {
    const uint64_t len = get<uint64_t>();
    if (pos + len > size) throw ParseError("blob extends past end of stream", pos);
    const uint8_t* ptr = data + pos;
    pos += len;
    return {ptr, static_cast<std::size_t>(len)};
  }
};

}  // namespace rpcc

#endif  // RPCC_BITSTREAM_HPP
