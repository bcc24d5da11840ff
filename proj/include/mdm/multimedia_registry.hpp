#pragma once

#include "mdm/agreement_registry.hpp"
#include "mdm/common.hpp"
#include "mdm/did_registry.hpp"
#include "mdm/wire.hpp"

#include <json.hpp>

#include <map>
#include <vector>

namespace mdm {

struct MultimediaRecord {
  std::string id;
  std::string owner_did;
  Address owner_account{};
  Hash32 content_hash{};   // hash of the off-chain source file
  Signature owner_sig{};   // owner's signature over content_hash
  std::string upload_ref;  // store://<hex content hash>
  bool approved = false;
  Address provider_account{};
  std::string provider_did;
  Hash32 agreement_hash{};
  std::vector<Hash32> access_log; // certificate ids, append-only
};

std::string locator_for(const Hash32& content_hash);
std::optional<Hash32> parse_locator(const std::string& upload_ref);

// Registration, provider approval, deregistration and access logging for
// multimedia works. Deregistration frees the id for re-use, unlike DID
// revocation.
class MultimediaRegistry {
public:
  ApplyResult register_media(const Address& caller, const std::string& id,
                             const std::string& owner_did, const Hash32& content_hash,
                             const Signature& owner_sig, const std::string& upload_ref,
                             const DidRegistry& dids);
  // Requires a settled agreement between the record owner's DID and the
  // given provider DID; the caller must be the agreement's provider party.
  ApplyResult approve(const Address& caller, const std::string& id,
                      const std::string& provider_did, const Hash32& agreement_hash,
                      const AgreementRegistry& agreements);
  ApplyResult deregister(const Address& caller, const std::string& id);
  ApplyResult log_access(const Address& caller, const std::string& id, const Hash32& cert_id);

  const MultimediaRecord* get(const std::string& id) const;

  size_t size() const { return records_.size(); }
  void encode_state(wire::Encoder& enc) const;
  nlohmann::json record_json(const MultimediaRecord& r) const;

private:
  std::map<std::string, MultimediaRecord> records_;
};

struct MediaRegisterArgs {
  std::string id;
  std::string owner_did;
  Hash32 content_hash{};
  Signature owner_sig{};
  std::string upload_ref;
  Bytes encode() const;
  static MediaRegisterArgs decode(const Bytes& payload);
};

struct MediaApproveArgs {
  std::string id;
  std::string provider_did;
  Hash32 agreement_hash{};
  Bytes encode() const;
  static MediaApproveArgs decode(const Bytes& payload);
};

struct MediaDeregisterArgs {
  std::string id;
  Bytes encode() const;
  static MediaDeregisterArgs decode(const Bytes& payload);
};

struct MediaLogAccessArgs {
  std::string id;
  Hash32 cert_id{};
  Bytes encode() const;
  static MediaLogAccessArgs decode(const Bytes& payload);
};

} // namespace mdm
