#pragma once

#include "mdm/common.hpp"

#include <span>

namespace mdm::wire {

// Canonical binary form used for everything that gets hashed or signed:
// each field is a byte string prefixed with its u32 big-endian length,
// fields concatenated in a fixed order. Integers are 8-byte big-endian
// byte strings. The same bytes must be produced on the signing and the
// verifying side, so nothing here may depend on locale, platform or map
// iteration order.
class Encoder {
public:
  Encoder& put_bytes(std::span<const uint8_t> b);
  Encoder& put_bytes(const Bytes& b) { return put_bytes(std::span<const uint8_t>(b)); }
  Encoder& put_str(std::string_view s);
  Encoder& put_u64(uint64_t v);
  Encoder& put_i64(int64_t v) { return put_u64(static_cast<uint64_t>(v)); }
  Encoder& put_u8(uint8_t v);
  template <size_t N>
  Encoder& put_fixed(const std::array<uint8_t, N>& a) {
    return put_bytes(std::span<const uint8_t>(a.data(), a.size()));
  }

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

private:
  void put_len(uint32_t n);
  Bytes buf_;
};

class Decoder {
public:
  explicit Decoder(std::span<const uint8_t> data) : data_(data) {}
  explicit Decoder(const Bytes& data) : data_(data) {}

  // Throws Error("decode") on truncated or malformed input.
  Bytes get_bytes();
  std::string get_str();
  uint64_t get_u64();
  int64_t get_i64() { return static_cast<int64_t>(get_u64()); }
  uint8_t get_u8();
  template <size_t N>
  std::array<uint8_t, N> get_fixed() {
    Bytes b = get_bytes();
    if (b.size() != N) throw Error("decode", "fixed field has wrong length");
    std::array<uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
  }

  bool done() const { return pos_ == data_.size(); }
  void expect_done() const {
    if (!done()) throw Error("decode", "trailing bytes");
  }

private:
  uint32_t get_len();
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

} // namespace mdm::wire
