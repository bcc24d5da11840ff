#pragma once

#include "mdm/common.hpp"

#include <span>

namespace mdm {

// Must run before any other crypto call; safe to call repeatedly.
void crypto_init();

Hash32 sha256(std::span<const uint8_t> data);
Hash32 sha256(const Bytes& data);
Hash32 sha256(std::string_view data);

// address = first 20 bytes of sha256(public key)
Address derive_address(const PublicKey& pk);

struct SecretKey {
  std::array<uint8_t, 64> bytes{}; // libsodium ed25519 secret key layout
};

// A signing identity: Ed25519 keypair plus the derived ledger address.
struct Account {
  PublicKey public_key{};
  SecretKey secret_key{};
  Address address{};

  static Account generate();
  // Deterministic keypair for fixtures and replayable tests.
  static Account from_seed(const std::array<uint8_t, 32>& seed);
  static Account from_keys(const PublicKey& pk, const SecretKey& sk);
};

Signature sign(const SecretKey& sk, std::span<const uint8_t> msg);
Signature sign(const SecretKey& sk, const Bytes& msg);
bool verify(const PublicKey& pk, std::span<const uint8_t> msg, const Signature& sig);
bool verify(const PublicKey& pk, const Bytes& msg, const Signature& sig);

} // namespace mdm
