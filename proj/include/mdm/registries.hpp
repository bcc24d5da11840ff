#pragma once

#include "mdm/agreement_registry.hpp"
#include "mdm/certificate_registry.hpp"
#include "mdm/chain.hpp"
#include "mdm/did_registry.hpp"
#include "mdm/multimedia_registry.hpp"

#include <json.hpp>

namespace mdm {

// The on-chain state: four registries plus the per-sender nonce counters.
// Mutated only through apply(), one transaction at a time.
struct Registries {
  DidRegistry dids;
  AgreementRegistry agreements;
  MultimediaRegistry multimedia;
  CertificateRegistry certificates;
  std::map<Address, uint64_t> nonces;

  uint64_t committed_nonce(const Address& a) const {
    auto it = nonces.find(a);
    return it == nonces.end() ? 0 : it->second;
  }

  // Dispatches tx.registry/tx.op, decoding the payload. The nonce is
  // consumed whether or not the call reverts. Returns the revert reason, or
  // nullopt on success.
  ApplyResult apply(const Transaction& tx);

  // sha256 over the canonical key-sorted serialization of all registry maps
  // and the nonce table.
  Hash32 state_root() const;

  // Read path for the generic query operation. Throws Error
  // ("unknown-registry" | "not-found").
  nlohmann::json query(const std::string& registry, const std::string& key) const;
};

} // namespace mdm
