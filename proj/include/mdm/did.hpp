#pragma once

#include "mdm/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdm {

// did:<method>:<idstring>, method and idstring nonempty.
bool is_valid_did(const std::string& did);

// Platform-minted DID for a ledger account.
std::string did_for_address(const Address& addr);

struct DidPublicKey {
  std::string id;         // <did>#<fragment>
  std::string type;       // verification scheme name, e.g. "Ed25519VerificationKey2018"
  std::string controller; // DID
  std::string material;   // scheme-dependent key material (hex for Ed25519)
};

struct DidServiceEndpoint {
  std::string id; // <did>#<fragment>
  std::string type;
  std::string endpoint;
};

// The document bound to a DID: context, id, public keys, service endpoints.
// Stored on-chain verbatim as the canonical key-sorted JSON text; this struct
// is the parsed view used for validation and key lookup.
struct DidDocument {
  std::string context;
  std::string id;
  std::vector<DidPublicKey> public_keys;
  std::vector<DidServiceEndpoint> services;

  // Compact JSON with keys sorted, the canonical textual form.
  std::string canonical() const;

  // Parses the JSON text; returns nullopt and fills err on malformed input.
  static std::optional<DidDocument> parse(const std::string& text, std::string* err = nullptr);

  // Shape checks: id equals the DID, at least one public key, every key and
  // service id is the DID plus a fragment. Returns an error description or
  // nullopt when valid.
  std::optional<std::string> validate(const std::string& did) const;

  // First key usable for Ed25519 verification (type mentions Ed25519 and the
  // material is 32 bytes of hex).
  std::optional<PublicKey> first_verification_key() const;
};

// Standard single-key document used by the CLI and fixtures.
DidDocument make_ddo(const std::string& did, const PublicKey& pk,
                     const std::string& service_endpoint = "");

} // namespace mdm
