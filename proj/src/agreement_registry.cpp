#include "mdm/agreement_registry.hpp"

#include "mdm/crypto.hpp"

namespace mdm {

using nlohmann::json;

Bytes agreement_signing_bytes(const std::string& id, const std::string& owner_did,
                              const std::string& provider_did, const Hash32& agreement_hash,
                              uint64_t valid_time_s, const std::string& copyrights) {
  wire::Encoder enc;
  enc.put_str("mdm-agreement-v1")
      .put_str(id)
      .put_str(owner_did)
      .put_str(provider_did)
      .put_fixed(agreement_hash)
      .put_u64(valid_time_s)
      .put_str(copyrights);
  return enc.take();
}

ApplyResult AgreementRegistry::generate(const Address& caller, const std::string& id,
                                        const std::string& owner_did,
                                        const Address& owner_account,
                                        const std::string& provider_did,
                                        const Hash32& agreement_hash, uint64_t valid_time_s,
                                        const std::string& copyrights, const DidRegistry& dids) {
  auto it = records_.find(id);
  if (it != records_.end() && it->second.settled) return "already-settled";

  const DidRecord* owner_rec = dids.record(owner_did);
  if (!owner_rec || owner_rec->revoked) return "unknown-did";
  const DidRecord* provider_rec = dids.record(provider_did);
  if (!provider_rec || provider_rec->revoked) return "unknown-did";
  // the declared owner account must be the account controlling the owner DID
  if (owner_account != owner_rec->owner) return "owner-mismatch";

  Agreement a;
  a.id = id;
  a.owner_did = owner_did;
  a.owner_account = owner_account;
  a.provider_did = provider_did;
  a.provider_account = caller;
  a.agreement_hash = agreement_hash;
  a.valid_time_s = valid_time_s;
  a.copyrights = copyrights;
  records_[id] = std::move(a); // redrafting an unsettled id resets signatures
  return std::nullopt;
}

ApplyResult AgreementRegistry::sign_impl(const Address& caller, const std::string& id,
                                         const Signature& sig, const DidRegistry& dids,
                                         bool as_owner) {
  auto it = records_.find(id);
  if (it == records_.end()) return "not-found";
  Agreement& a = it->second;

  const Address& party_account = as_owner ? a.owner_account : a.provider_account;
  if (caller != party_account) return as_owner ? "not-owner" : "not-provider";
  bool& signed_flag = as_owner ? a.owner_signed : a.provider_signed;
  if (a.settled || signed_flag) return "double-sign";

  const std::string& party_did = as_owner ? a.owner_did : a.provider_did;
  auto key = dids.verification_key(party_did);
  if (!key) return "bad-signature";
  Bytes msg = agreement_signing_bytes(a.id, a.owner_did, a.provider_did, a.agreement_hash,
                                      a.valid_time_s, a.copyrights);
  if (!verify(*key, msg, sig)) return "bad-signature";

  (as_owner ? a.owner_sig : a.provider_sig) = sig;
  signed_flag = true;
  if (a.owner_signed && a.provider_signed) a.settled = true;
  return std::nullopt;
}

ApplyResult AgreementRegistry::owner_sign(const Address& caller, const std::string& id,
                                          const Signature& sig, const DidRegistry& dids) {
  return sign_impl(caller, id, sig, dids, true);
}

ApplyResult AgreementRegistry::provider_sign(const Address& caller, const std::string& id,
                                             const Signature& sig, const DidRegistry& dids) {
  return sign_impl(caller, id, sig, dids, false);
}

const Agreement* AgreementRegistry::get(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const Agreement* AgreementRegistry::find_settled_by_hash(const Hash32& agreement_hash) const {
  for (const auto& [id, a] : records_)
    if (a.settled && a.agreement_hash == agreement_hash) return &a;
  return nullptr;
}

void AgreementRegistry::encode_state(wire::Encoder& enc) const {
  enc.put_str("agreement-registry");
  enc.put_u64(records_.size());
  for (const auto& [id, a] : records_) {
    enc.put_str(id)
        .put_str(a.owner_did)
        .put_fixed(a.owner_account)
        .put_str(a.provider_did)
        .put_fixed(a.provider_account)
        .put_fixed(a.agreement_hash)
        .put_u64(a.valid_time_s)
        .put_str(a.copyrights)
        .put_fixed(a.owner_sig)
        .put_fixed(a.provider_sig)
        .put_u8(static_cast<uint8_t>((a.owner_signed ? 1 : 0) | (a.provider_signed ? 2 : 0) |
                                     (a.settled ? 4 : 0)));
  }
}

json AgreementRegistry::record_json(const Agreement& a) const {
  json j;
  j["id"] = a.id;
  j["owner_did"] = a.owner_did;
  j["owner_account"] = to_hex(a.owner_account);
  j["provider_did"] = a.provider_did;
  j["provider_account"] = to_hex(a.provider_account);
  j["agreement_hash"] = to_hex(a.agreement_hash);
  j["valid_time_s"] = a.valid_time_s;
  j["copyrights"] = a.copyrights;
  j["owner_signed"] = a.owner_signed;
  j["provider_signed"] = a.provider_signed;
  j["settled"] = a.settled;
  if (a.owner_signed) j["owner_sig"] = to_hex(a.owner_sig);
  if (a.provider_signed) j["provider_sig"] = to_hex(a.provider_sig);
  return j;
}

Bytes AgreementGenerateArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id)
      .put_str(owner_did)
      .put_fixed(owner_account)
      .put_str(provider_did)
      .put_fixed(agreement_hash)
      .put_u64(valid_time_s)
      .put_str(copyrights);
  return enc.take();
}

AgreementGenerateArgs AgreementGenerateArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  AgreementGenerateArgs a;
  a.id = dec.get_str();
  a.owner_did = dec.get_str();
  a.owner_account = dec.get_fixed<20>();
  a.provider_did = dec.get_str();
  a.agreement_hash = dec.get_fixed<32>();
  a.valid_time_s = dec.get_u64();
  a.copyrights = dec.get_str();
  dec.expect_done();
  return a;
}

Bytes AgreementSignArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id).put_fixed(sig);
  return enc.take();
}

AgreementSignArgs AgreementSignArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  AgreementSignArgs a;
  a.id = dec.get_str();
  a.sig = dec.get_fixed<64>();
  dec.expect_done();
  return a;
}

} // namespace mdm
