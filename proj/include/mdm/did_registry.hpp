#pragma once

#include "mdm/common.hpp"
#include "mdm/did.hpp"
#include "mdm/wire.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>

namespace mdm {

// Revert reason; empty optional means the mutation was applied.
using ApplyResult = std::optional<std::string>;

struct DidRecord {
  Address owner{};          // account that registered the DID; only it may mutate
  Address bound_account{};  // declared account binding, stored and exposed, not used
  std::string did;
  std::string ddo;          // document text, stored verbatim
  bool revoked = false;
};

// Binds DIDs to their documents and controlling accounts. Registration is
// one-shot per DID string for all time: revocation deletes the document but
// keeps the name burned, so a revoked identity cannot be resurrected.
class DidRegistry {
public:
  ApplyResult register_did(const Address& caller, const Address& bound_account,
                           const std::string& did, const std::string& ddo);
  ApplyResult update_ddo(const Address& caller, const std::string& did, const std::string& ddo);
  ApplyResult revoke(const Address& caller, const std::string& did);

  // Read path. resolve distinguishes not-found from revoked via the error
  // out-parameter ("not-found" | "revoked").
  std::optional<std::string> resolve(const std::string& did, std::string* err = nullptr) const;
  const DidRecord* record(const std::string& did) const;
  bool ever_registered(const std::string& did) const { return used_.count(did) != 0; }

  // Resolves the DID and extracts its Ed25519 verification key; nullopt when
  // the DID is missing, revoked, or carries no usable key.
  std::optional<PublicKey> verification_key(const std::string& did) const;

  size_t size() const { return records_.size(); }
  void encode_state(wire::Encoder& enc) const;
  nlohmann::json record_json(const DidRecord& r) const;

private:
  std::map<std::string, DidRecord> records_;
  std::set<std::string> used_; // every DID ever registered, including revoked
};

// Operation argument codecs: the transaction payload wire format.
struct DidRegisterArgs {
  Address bound_account{};
  std::string did;
  std::string ddo;
  Bytes encode() const;
  static DidRegisterArgs decode(const Bytes& payload);
};

struct DidUpdateArgs {
  std::string did;
  std::string ddo;
  Bytes encode() const;
  static DidUpdateArgs decode(const Bytes& payload);
};

struct DidRevokeArgs {
  std::string did;
  Bytes encode() const;
  static DidRevokeArgs decode(const Bytes& payload);
};

} // namespace mdm
