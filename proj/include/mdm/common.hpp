#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdm {

using Bytes = std::vector<uint8_t>;
using Hash32 = std::array<uint8_t, 32>;
using Address = std::array<uint8_t, 20>;   // first 20 bytes of sha256(public key)
using PublicKey = std::array<uint8_t, 32>; // Ed25519
using Signature = std::array<uint8_t, 64>; // Ed25519 detached

// Error with a stable machine-readable code plus a human detail message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& detail = "")
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

std::string to_hex(const uint8_t* data, size_t len);
std::string to_hex(const Bytes& b);
template <size_t N>
std::string to_hex(const std::array<uint8_t, N>& a) {
  return to_hex(a.data(), a.size());
}

std::optional<Bytes> from_hex(std::string_view hex);
template <size_t N>
std::optional<std::array<uint8_t, N>> from_hex_fixed(std::string_view hex) {
  auto b = from_hex(hex);
  if (!b || b->size() != N) return std::nullopt;
  std::array<uint8_t, N> out{};
  std::copy(b->begin(), b->end(), out.begin());
  return out;
}

// Unpadded base64url. Decoding is strict: no '=', no whitespace, length
// mod 4 != 1, and unused trailing bits must be zero, so the mapping from
// encoded text to bytes is injective.
std::string base64url_encode(const uint8_t* data, size_t len);
std::string base64url_encode(const Bytes& b);
std::optional<Bytes> base64url_decode(std::string_view text);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

inline int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

} // namespace mdm
