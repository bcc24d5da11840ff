#include "mdm/wire.hpp"

namespace mdm::wire {

void Encoder::put_len(uint32_t n) {
  buf_.push_back(static_cast<uint8_t>(n >> 24));
  buf_.push_back(static_cast<uint8_t>(n >> 16));
  buf_.push_back(static_cast<uint8_t>(n >> 8));
  buf_.push_back(static_cast<uint8_t>(n));
}

Encoder& Encoder::put_bytes(std::span<const uint8_t> b) {
  put_len(static_cast<uint32_t>(b.size()));
  buf_.insert(buf_.end(), b.begin(), b.end());
  return *this;
}

Encoder& Encoder::put_str(std::string_view s) {
  put_len(static_cast<uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
  return *this;
}

Encoder& Encoder::put_u64(uint64_t v) {
  std::array<uint8_t, 8> be{};
  for (int i = 7; i >= 0; --i) {
    be[static_cast<size_t>(i)] = static_cast<uint8_t>(v & 0xff);
    v >>= 8;
  }
  return put_fixed(be);
}

Encoder& Encoder::put_u8(uint8_t v) {
  std::array<uint8_t, 1> b{v};
  return put_fixed(b);
}

uint32_t Decoder::get_len() {
  if (pos_ + 4 > data_.size()) throw Error("decode", "truncated length prefix");
  uint32_t n = (uint32_t(data_[pos_]) << 24) | (uint32_t(data_[pos_ + 1]) << 16) |
               (uint32_t(data_[pos_ + 2]) << 8) | uint32_t(data_[pos_ + 3]);
  pos_ += 4;
  return n;
}

Bytes Decoder::get_bytes() {
  uint32_t n = get_len();
  if (pos_ + n > data_.size()) throw Error("decode", "truncated field");
  Bytes out(data_.begin() + static_cast<ptrdiff_t>(pos_),
            data_.begin() + static_cast<ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

std::string Decoder::get_str() {
  Bytes b = get_bytes();
  return std::string(b.begin(), b.end());
}

uint64_t Decoder::get_u64() {
  auto be = get_fixed<8>();
  uint64_t v = 0;
  for (uint8_t byte : be) v = (v << 8) | byte;
  return v;
}

uint8_t Decoder::get_u8() { return get_fixed<1>()[0]; }

} // namespace mdm::wire
