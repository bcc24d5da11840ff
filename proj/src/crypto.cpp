#include "mdm/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace mdm {

void crypto_init() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error("crypto-init", "libsodium initialization failed");
  });
}

Hash32 sha256(std::span<const uint8_t> data) {
  crypto_init();
  Hash32 out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Hash32 sha256(const Bytes& data) { return sha256(std::span<const uint8_t>(data)); }

Hash32 sha256(std::string_view data) {
  return sha256(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(data.data()),
                                         data.size()));
}

Address derive_address(const PublicKey& pk) {
  Hash32 h = sha256(std::span<const uint8_t>(pk.data(), pk.size()));
  Address a{};
  std::memcpy(a.data(), h.data(), a.size());
  return a;
}

Account Account::generate() {
  crypto_init();
  Account acc;
  crypto_sign_keypair(acc.public_key.data(), acc.secret_key.bytes.data());
  acc.address = derive_address(acc.public_key);
  return acc;
}

Account Account::from_seed(const std::array<uint8_t, 32>& seed) {
  crypto_init();
  Account acc;
  crypto_sign_seed_keypair(acc.public_key.data(), acc.secret_key.bytes.data(), seed.data());
  acc.address = derive_address(acc.public_key);
  return acc;
}

Account Account::from_keys(const PublicKey& pk, const SecretKey& sk) {
  Account acc;
  acc.public_key = pk;
  acc.secret_key = sk;
  acc.address = derive_address(pk);
  return acc;
}

Signature sign(const SecretKey& sk, std::span<const uint8_t> msg) {
  crypto_init();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), sk.bytes.data());
  return sig;
}

Signature sign(const SecretKey& sk, const Bytes& msg) {
  return sign(sk, std::span<const uint8_t>(msg));
}

bool verify(const PublicKey& pk, std::span<const uint8_t> msg, const Signature& sig) {
  crypto_init();
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pk.data()) == 0;
}

bool verify(const PublicKey& pk, const Bytes& msg, const Signature& sig) {
  return verify(pk, std::span<const uint8_t>(msg), sig);
}

} // namespace mdm
