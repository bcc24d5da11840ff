#include "mdm/multimedia_registry.hpp"

#include "mdm/crypto.hpp"

namespace mdm {

using nlohmann::json;

std::string locator_for(const Hash32& content_hash) { return "store://" + to_hex(content_hash); }

std::optional<Hash32> parse_locator(const std::string& upload_ref) {
  constexpr std::string_view prefix = "store://";
  if (upload_ref.rfind(prefix, 0) != 0) return std::nullopt;
  return from_hex_fixed<32>(std::string_view(upload_ref).substr(prefix.size()));
}

ApplyResult MultimediaRegistry::register_media(const Address& caller, const std::string& id,
                                               const std::string& owner_did,
                                               const Hash32& content_hash,
                                               const Signature& owner_sig,
                                               const std::string& upload_ref,
                                               const DidRegistry& dids) {
  if (records_.count(id)) return "already-registered";
  auto key = dids.verification_key(owner_did);
  if (!key) return "unknown-did";
  if (!verify(*key, std::span<const uint8_t>(content_hash.data(), content_hash.size()),
              owner_sig))
    return "bad-owner-signature";
  auto ref_hash = parse_locator(upload_ref);
  if (!ref_hash || *ref_hash != content_hash) return "bad-upload-ref";

  MultimediaRecord rec;
  rec.id = id;
  rec.owner_did = owner_did;
  rec.owner_account = caller;
  rec.content_hash = content_hash;
  rec.owner_sig = owner_sig;
  rec.upload_ref = upload_ref;
  records_.emplace(id, std::move(rec));
  return std::nullopt;
}

ApplyResult MultimediaRegistry::approve(const Address& caller, const std::string& id,
                                        const std::string& provider_did,
                                        const Hash32& agreement_hash,
                                        const AgreementRegistry& agreements) {
  auto it = records_.find(id);
  if (it == records_.end()) return "not-found";
  MultimediaRecord& rec = it->second;
  if (rec.approved) return "already-approved";

  const Agreement* agr = agreements.find_settled_by_hash(agreement_hash);
  if (!agr) return "agreement-not-settled";
  if (agr->owner_did != rec.owner_did || agr->provider_did != provider_did)
    return "party-mismatch";
  if (agr->provider_account != caller) return "party-mismatch";

  rec.approved = true;
  rec.provider_account = caller;
  rec.provider_did = provider_did;
  rec.agreement_hash = agreement_hash;
  return std::nullopt;
}

ApplyResult MultimediaRegistry::deregister(const Address& caller, const std::string& id) {
  auto it = records_.find(id);
  if (it == records_.end()) return "not-found";
  if (it->second.owner_account != caller) return "not-owner";
  records_.erase(it); // id becomes reusable
  return std::nullopt;
}

ApplyResult MultimediaRegistry::log_access(const Address& caller, const std::string& id,
                                           const Hash32& cert_id) {
  auto it = records_.find(id);
  if (it == records_.end()) return "not-found";
  if (!it->second.approved) return "not-approved";
  if (it->second.provider_account != caller) return "not-provider";
  it->second.access_log.push_back(cert_id);
  return std::nullopt;
}

const MultimediaRecord* MultimediaRegistry::get(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

void MultimediaRegistry::encode_state(wire::Encoder& enc) const {
  enc.put_str("multimedia-registry");
  enc.put_u64(records_.size());
  for (const auto& [id, r] : records_) {
    enc.put_str(id)
        .put_str(r.owner_did)
        .put_fixed(r.owner_account)
        .put_fixed(r.content_hash)
        .put_fixed(r.owner_sig)
        .put_str(r.upload_ref)
        .put_u8(r.approved ? 1 : 0)
        .put_fixed(r.provider_account)
        .put_str(r.provider_did)
        .put_fixed(r.agreement_hash);
    enc.put_u64(r.access_log.size());
    for (const auto& cert : r.access_log) enc.put_fixed(cert);
  }
}

json MultimediaRegistry::record_json(const MultimediaRecord& r) const {
  json j;
  j["id"] = r.id;
  j["owner_did"] = r.owner_did;
  j["owner_account"] = to_hex(r.owner_account);
  j["content_hash"] = to_hex(r.content_hash);
  j["owner_sig"] = to_hex(r.owner_sig);
  j["upload_ref"] = r.upload_ref;
  j["approved"] = r.approved;
  if (r.approved) {
    j["provider_account"] = to_hex(r.provider_account);
    j["provider_did"] = r.provider_did;
    j["agreement_hash"] = to_hex(r.agreement_hash);
  }
  json log = json::array();
  for (const auto& cert : r.access_log) log.push_back(to_hex(cert));
  j["access_log"] = std::move(log);
  return j;
}

Bytes MediaRegisterArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id).put_str(owner_did).put_fixed(content_hash).put_fixed(owner_sig).put_str(
      upload_ref);
  return enc.take();
}

MediaRegisterArgs MediaRegisterArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  MediaRegisterArgs a;
  a.id = dec.get_str();
  a.owner_did = dec.get_str();
  a.content_hash = dec.get_fixed<32>();
  a.owner_sig = dec.get_fixed<64>();
  a.upload_ref = dec.get_str();
  dec.expect_done();
  return a;
}

Bytes MediaApproveArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id).put_str(provider_did).put_fixed(agreement_hash);
  return enc.take();
}

MediaApproveArgs MediaApproveArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  MediaApproveArgs a;
  a.id = dec.get_str();
  a.provider_did = dec.get_str();
  a.agreement_hash = dec.get_fixed<32>();
  dec.expect_done();
  return a;
}

Bytes MediaDeregisterArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id);
  return enc.take();
}

MediaDeregisterArgs MediaDeregisterArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  MediaDeregisterArgs a;
  a.id = dec.get_str();
  dec.expect_done();
  return a;
}

Bytes MediaLogAccessArgs::encode() const {
  wire::Encoder enc;
  enc.put_str(id).put_fixed(cert_id);
  return enc.take();
}

MediaLogAccessArgs MediaLogAccessArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  MediaLogAccessArgs a;
  a.id = dec.get_str();
  a.cert_id = dec.get_fixed<32>();
  dec.expect_done();
  return a;
}

} // namespace mdm
