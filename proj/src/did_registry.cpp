#include "mdm/did_registry.hpp"

namespace mdm {

using nlohmann::json;

ApplyResult DidRegistry::register_did(const Address& caller, const Address& bound_account,
                                      const std::string& did, const std::string& ddo) {
  if (used_.count(did)) return "already-registered";
  auto doc = DidDocument::parse(ddo);
  if (!doc) return "malformed-ddo";
  if (doc->validate(did)) return "malformed-ddo";

  DidRecord rec;
  rec.owner = caller;
  rec.bound_account = bound_account;
  rec.did = did;
  rec.ddo = ddo;
  used_.insert(did);
  records_.emplace(did, std::move(rec));
  return std::nullopt;
}

ApplyResult DidRegistry::update_ddo(const Address& caller, const std::string& did,
                                    const std::string& ddo) {
  auto it = records_.find(did);
  if (it == records_.end()) return "not-found";
  if (it->second.revoked) return "revoked";
  if (it->second.owner != caller) return "not-owner";
  auto doc = DidDocument::parse(ddo);
  if (!doc || doc->validate(did)) return "malformed-ddo";
  it->second.ddo = ddo;
  return std::nullopt;
}

ApplyResult DidRegistry::revoke(const Address& caller, const std::string& did) {
  auto it = records_.find(did);
  if (it == records_.end()) return "not-found";
  if (it->second.revoked) return "revoked";
  if (it->second.owner != caller) return "not-owner";
  it->second.revoked = true;
  it->second.ddo.clear(); // document deleted; the DID string stays burned
  return std::nullopt;
}

std::optional<std::string> DidRegistry::resolve(const std::string& did, std::string* err) const {
  auto it = records_.find(did);
  if (it == records_.end()) {
    if (err) *err = "not-found";
    return std::nullopt;
  }
  if (it->second.revoked) {
    if (err) *err = "revoked";
    return std::nullopt;
  }
  return it->second.ddo;
}

const DidRecord* DidRegistry::record(const std::string& did) const {
  auto it = records_.find(did);
  return it == records_.end() ? nullptr : &it->second;
}

std::optional<PublicKey> DidRegistry::verification_key(const std::string& did) const {
  auto ddo = resolve(did);
  if (!ddo) return std::nullopt;
  auto doc = DidDocument::parse(*ddo);
  if (!doc) return std::nullopt;
  return doc->first_verification_key();
}

void DidRegistry::encode_state(wire::Encoder& enc) const {
  enc.put_str("did-registry");
  enc.put_u64(records_.size());
  for (const auto& [did, rec] : records_) {
    enc.put_str(did)
        .put_fixed(rec.owner)
        .put_fixed(rec.bound_account)
        .put_str(rec.ddo)
        .put_u8(rec.revoked ? 1 : 0);
  }
  enc.put_u64(used_.size());
  for (const auto& did : used_) enc.put_str(did);
}

json DidRegistry::record_json(const DidRecord& r) const {
  json j;
  j["owner"] = to_hex(r.owner);
  j["bound_account"] = to_hex(r.bound_account);
  j["did"] = r.did;
  j["ddo"] = r.ddo;
  j["revoked"] = r.revoked;
  return j;
}

Bytes DidRegisterArgs::encode() const {
  wire::Encoder enc;
  enc.put_fixed(bound_account).put_str(did).put_str(ddo);
  return enc.take();
}

DidRegisterArgs DidRegisterArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  DidRegisterArgs a;
  a.bound_account = dec.get_fixed<20>();
  a.did = dec.get_str();
  a.ddo = dec.get_str();
  dec.expect_done();
  return a;
}

Bytes DidUpdateArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(did).put_str(ddo);
  return enc.take();
}

DidUpdateArgs DidUpdateArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  DidUpdateArgs a;
  a.did = dec.get_str();
  a.ddo = dec.get_str();
  dec.expect_done();
  return a;
}

Bytes DidRevokeArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(did);
  return enc.take();
}

DidRevokeArgs DidRevokeArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  DidRevokeArgs a;
  a.did = dec.get_str();
  dec.expect_done();
  return a;
}

} // namespace mdm
