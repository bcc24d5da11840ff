#include "mdm/registries.hpp"

namespace mdm {

using nlohmann::json;

ApplyResult Registries::apply(const Transaction& tx) {
  nonces[tx.sender] = tx.nonce; // consumed even when the call reverts

  try {
    if (tx.registry == "did-registry") {
      if (tx.op == "register") {
        auto a = DidRegisterArgs::decode(tx.payload);
        return dids.register_did(tx.sender, a.bound_account, a.did, a.ddo);
      }
      if (tx.op == "update_ddo") {
        auto a = DidUpdateArgs::decode(tx.payload);
        return dids.update_ddo(tx.sender, a.did, a.ddo);
      }
      if (tx.op == "revoke") {
        auto a = DidRevokeArgs::decode(tx.payload);
        return dids.revoke(tx.sender, a.did);
      }
    } else if (tx.registry == "agreement-registry") {
      if (tx.op == "generate") {
        auto a = AgreementGenerateArgs::decode(tx.payload);
        return agreements.generate(tx.sender, a.id, a.owner_did, a.owner_account,
                                   a.provider_did, a.agreement_hash, a.valid_time_s,
                                   a.copyrights, dids);
      }
      if (tx.op == "owner_sign") {
        auto a = AgreementSignArgs::decode(tx.payload);
        return agreements.owner_sign(tx.sender, a.id, a.sig, dids);
      }
      if (tx.op == "provider_sign") {
        auto a = AgreementSignArgs::decode(tx.payload);
        return agreements.provider_sign(tx.sender, a.id, a.sig, dids);
      }
    } else if (tx.registry == "multimedia-registry") {
      if (tx.op == "register") {
        auto a = MediaRegisterArgs::decode(tx.payload);
        return multimedia.register_media(tx.sender, a.id, a.owner_did, a.content_hash,
                                         a.owner_sig, a.upload_ref, dids);
      }
      if (tx.op == "approve") {
        auto a = MediaApproveArgs::decode(tx.payload);
        return multimedia.approve(tx.sender, a.id, a.provider_did, a.agreement_hash,
                                  agreements);
      }
      if (tx.op == "deregister") {
        auto a = MediaDeregisterArgs::decode(tx.payload);
        return multimedia.deregister(tx.sender, a.id);
      }
      if (tx.op == "log_access") {
        auto a = MediaLogAccessArgs::decode(tx.payload);
        return multimedia.log_access(tx.sender, a.id, a.cert_id);
      }
    } else if (tx.registry == "access-certificates") {
      if (tx.op == "issue_cert") {
        auto a = CertIssueArgs::decode(tx.payload);
        auto rights = AccessRights::from_mask(a.rights_mask);
        if (!rights) return "empty-rights";
        return certificates.issue(tx.sender, a.cert_id, a.multimedia_id, a.provider_did,
                                  a.enduser_did, a.owner_sig, *rights, a.valid_time,
                                  a.provider_sig, multimedia);
      }
    } else {
      return "unknown-registry";
    }
  } catch (const Error&) {
    return "bad-payload";
  }
  return "unknown-operation";
}

Hash32 Registries::state_root() const {
  // registry maps only; nonce counters are rebuilt from the transaction
  // stream and validated there, so a reverted call leaves the root untouched
  wire::Encoder enc;
  enc.put_str("mdm-state-v1");
  dids.encode_state(enc);
  agreements.encode_state(enc);
  multimedia.encode_state(enc);
  certificates.encode_state(enc);
  return sha256(enc.bytes());
}

json Registries::query(const std::string& registry, const std::string& key) const {
  if (registry == "did-registry") {
    const DidRecord* r = dids.record(key);
    if (!r) throw Error("not-found");
    return dids.record_json(*r);
  }
  if (registry == "agreement-registry") {
    const Agreement* a = agreements.get(key);
    if (!a) throw Error("not-found");
    return agreements.record_json(*a);
  }
  if (registry == "multimedia-registry") {
    const MultimediaRecord* r = multimedia.get(key);
    if (!r) throw Error("not-found");
    return multimedia.record_json(*r);
  }
  if (registry == "access-certificates") {
    auto id = from_hex_fixed<32>(key);
    if (!id) throw Error("not-found");
    const AccessCertificate* c = certificates.get(*id);
    if (!c) throw Error("not-found");
    return certificates.record_json(*c);
  }
  throw Error("unknown-registry", registry);
}

} // namespace mdm
