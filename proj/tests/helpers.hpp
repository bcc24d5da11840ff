#pragma once

// Shared fixture helpers for the test suites: deterministic accounts,
// registered identities and the registration -> agreement -> approval
// pipeline, built directly against a ledger.

#include "mdm/did.hpp"
#include "mdm/ledger.hpp"

#include <random>
#include <string>

namespace mdm::test {

inline Account account(uint8_t tag) {
  std::array<uint8_t, 32> seed{};
  seed.fill(tag);
  return Account::from_seed(seed);
}

inline Bytes random_bytes(std::mt19937_64& rng, size_t min_len = 0, size_t max_len = 64) {
  std::uniform_int_distribution<size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<int> byte_dist(0, 255);
  Bytes out(len_dist(rng));
  for (auto& b : out) b = static_cast<uint8_t>(byte_dist(rng));
  return out;
}

// Seals with a synthetic clock until the pool is empty.
inline void seal_all(Ledger& ledger) {
  while (ledger.pool_size() > 0)
    ledger.seal_tick(ledger.last_block_time_ms() + ledger.config().block_interval_ms);
}

// Submits, seals with a synthetic clock, returns the outcome.
inline TxResult apply_tx(Ledger& ledger, const Account& from, const std::string& registry,
                         const std::string& op, Bytes payload) {
  Transaction tx = Transaction::make_signed(from, ledger.expected_nonce(from.address), registry,
                                            op, std::move(payload));
  auto handle = ledger.submit(std::move(tx));
  seal_all(ledger);
  auto r = handle->poll();
  return r ? *r : TxResult{};
}

inline std::string register_identity(Ledger& ledger, const Account& acc,
                                     const std::string& endpoint = "") {
  std::string did = did_for_address(acc.address);
  std::string ddo = make_ddo(did, acc.public_key, endpoint).canonical();
  auto r = apply_tx(ledger, acc, "did-registry", "register",
                    DidRegisterArgs{acc.address, did, ddo}.encode());
  if (!r.ok()) throw Error("fixture", "identity registration failed: " + r.reason);
  return did;
}

struct Pipeline {
  Account owner, provider, enduser;
  std::string owner_did, provider_did, enduser_did;
  std::string media_id = "media-1";
  std::string agreement_id = "agreement-1";
  Hash32 content_hash{};
  Hash32 agreement_hash{};
  Bytes content;
};

// Registers three identities, one work, settles the agreement and approves
// the work; every step must succeed.
inline Pipeline run_pipeline(Ledger& ledger, const std::string& copyrights =
                                                 "broadcasting,performance,publication") {
  Pipeline p;
  p.owner = account(1);
  p.provider = account(2);
  p.enduser = account(3);
  p.owner_did = register_identity(ledger, p.owner);
  p.provider_did = register_identity(ledger, p.provider);
  p.enduser_did = register_identity(ledger, p.enduser, "https://enduser.example/inbox");

  p.content = to_bytes("three-party fixture content");
  p.content_hash = sha256(p.content);
  MediaRegisterArgs reg;
  reg.id = p.media_id;
  reg.owner_did = p.owner_did;
  reg.content_hash = p.content_hash;
  reg.owner_sig = sign(p.owner.secret_key,
                       std::span<const uint8_t>(p.content_hash.data(), p.content_hash.size()));
  reg.upload_ref = locator_for(p.content_hash);
  if (!apply_tx(ledger, p.owner, "multimedia-registry", "register", reg.encode()).ok())
    throw Error("fixture", "media registration failed");

  p.agreement_hash = sha256("agreement document");
  AgreementGenerateArgs agr;
  agr.id = p.agreement_id;
  agr.owner_did = p.owner_did;
  agr.owner_account = p.owner.address;
  agr.provider_did = p.provider_did;
  agr.agreement_hash = p.agreement_hash;
  agr.valid_time_s = 3600;
  agr.copyrights = copyrights;
  if (!apply_tx(ledger, p.provider, "agreement-registry", "generate", agr.encode()).ok())
    throw Error("fixture", "agreement generate failed");

  Bytes msg = agreement_signing_bytes(agr.id, agr.owner_did, agr.provider_did,
                                      agr.agreement_hash, agr.valid_time_s, agr.copyrights);
  if (!apply_tx(ledger, p.owner, "agreement-registry", "owner_sign",
                AgreementSignArgs{agr.id, sign(p.owner.secret_key, msg)}.encode())
           .ok())
    throw Error("fixture", "owner sign failed");
  if (!apply_tx(ledger, p.provider, "agreement-registry", "provider_sign",
                AgreementSignArgs{agr.id, sign(p.provider.secret_key, msg)}.encode())
           .ok())
    throw Error("fixture", "provider sign failed");

  MediaApproveArgs app;
  app.id = p.media_id;
  app.provider_did = p.provider_did;
  app.agreement_hash = p.agreement_hash;
  if (!apply_tx(ledger, p.provider, "multimedia-registry", "approve", app.encode()).ok())
    throw Error("fixture", "approval failed");
  return p;
}

} // namespace mdm::test
