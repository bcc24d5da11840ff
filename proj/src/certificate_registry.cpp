#include "mdm/certificate_registry.hpp"

namespace mdm {

using nlohmann::json;

Bytes CertificateInfo::canonical_bytes() const {
  std::array<uint8_t, 16> time_be{};
  uint64_t nb = static_cast<uint64_t>(valid_time.not_before_ms);
  uint64_t na = static_cast<uint64_t>(valid_time.not_after_ms);
  for (int i = 7; i >= 0; --i) {
    time_be[static_cast<size_t>(i)] = static_cast<uint8_t>(nb & 0xff);
    time_be[static_cast<size_t>(8 + i)] = static_cast<uint8_t>(na & 0xff);
    nb >>= 8;
    na >>= 8;
  }
  wire::Encoder enc;
  enc.put_str(owner_did)
      .put_str(provider_did)
      .put_str(enduser_did)
      .put_str(multimedia_id)
      .put_u8(rights.mask)
      .put_fixed(time_be)
      .put_fixed(owner_sig);
  return enc.take();
}

ApplyResult CertificateRegistry::issue(const Address& caller, const Hash32& cert_id,
                                       const std::string& multimedia_id,
                                       const std::string& provider_did,
                                       const std::string& enduser_did,
                                       const Signature& owner_sig, AccessRights rights,
                                       ValidTime valid_time, const Signature& provider_sig,
                                       MultimediaRegistry& media) {
  std::string key = to_hex(cert_id);
  if (records_.count(key)) return "already-issued";

  const MultimediaRecord* rec = media.get(multimedia_id);
  if (!rec) return "not-found";
  if (!rec->approved) return "not-approved";
  if (rec->provider_account != caller) return "not-provider";
  if (rights.empty()) return "empty-rights";

  AccessCertificate cert;
  cert.cert_id = cert_id;
  cert.info.owner_did = rec->owner_did;
  cert.info.provider_did = provider_did;
  cert.info.enduser_did = enduser_did;
  cert.info.multimedia_id = multimedia_id;
  cert.info.rights = rights;
  cert.info.valid_time = valid_time;
  cert.info.owner_sig = owner_sig;
  cert.provider_sig = provider_sig;
  cert.content_hash = rec->content_hash;
  // the certificate id must be the hash of its own content
  if (cert.info.cert_id() != cert_id) return "cert-id-mismatch";

  auto log_err = media.log_access(caller, multimedia_id, cert_id);
  if (log_err) return log_err; // unreachable after the checks above

  records_.emplace(std::move(key), std::move(cert));
  return std::nullopt;
}

const AccessCertificate* CertificateRegistry::get(const Hash32& cert_id) const {
  auto it = records_.find(to_hex(cert_id));
  return it == records_.end() ? nullptr : &it->second;
}

void CertificateRegistry::encode_state(wire::Encoder& enc) const {
  enc.put_str("access-certificates");
  enc.put_u64(records_.size());
  for (const auto& [key, c] : records_) {
    enc.put_str(key)
        .put_str(c.info.owner_did)
        .put_str(c.info.provider_did)
        .put_str(c.info.enduser_did)
        .put_str(c.info.multimedia_id)
        .put_u8(c.info.rights.mask)
        .put_i64(c.info.valid_time.not_before_ms)
        .put_i64(c.info.valid_time.not_after_ms)
        .put_fixed(c.info.owner_sig)
        .put_fixed(c.provider_sig)
        .put_fixed(c.content_hash);
  }
}

json CertificateRegistry::record_json(const AccessCertificate& c) const {
  json j;
  j["cert_id"] = to_hex(c.cert_id);
  j["owner_did"] = c.info.owner_did;
  j["provider_did"] = c.info.provider_did;
  j["enduser_did"] = c.info.enduser_did;
  j["multimedia_id"] = c.info.multimedia_id;
  j["rights"] = c.info.rights.names();
  j["rights_mask"] = c.info.rights.mask;
  j["not_before_ms"] = c.info.valid_time.not_before_ms;
  j["not_after_ms"] = c.info.valid_time.not_after_ms;
  j["owner_sig"] = to_hex(c.info.owner_sig);
  j["provider_sig"] = to_hex(c.provider_sig);
  j["content_hash"] = to_hex(c.content_hash);
  j["issued"] = c.issued;
  return j;
}

Bytes CertIssueArgs::encode() const {
  wire::Encoder enc;
  enc.put_fixed(cert_id)
      .put_str(multimedia_id)
      .put_str(provider_did)
      .put_str(enduser_did)
      .put_fixed(owner_sig)
      .put_u8(rights_mask)
      .put_i64(valid_time.not_before_ms)
      .put_i64(valid_time.not_after_ms)
      .put_fixed(provider_sig);
  return enc.take();
}

CertIssueArgs CertIssueArgs::decode(const Bytes& payload) {
  wire::Decoder dec(payload);
  CertIssueArgs a;
  a.cert_id = dec.get_fixed<32>();
  a.multimedia_id = dec.get_str();
  a.provider_did = dec.get_str();
  a.enduser_did = dec.get_str();
  a.owner_sig = dec.get_fixed<64>();
  a.rights_mask = dec.get_u8();
  a.valid_time.not_before_ms = dec.get_i64();
  a.valid_time.not_after_ms = dec.get_i64();
  a.provider_sig = dec.get_fixed<64>();
  dec.expect_done();
  return a;
}

} // namespace mdm
