#pragma once

#include "mdm/common.hpp"
#include "mdm/crypto.hpp"
#include "mdm/multimedia_registry.hpp"
#include "mdm/rights.hpp"
#include "mdm/wire.hpp"

#include <json.hpp>

#include <map>

namespace mdm {

// [not_before, not_after) in milliseconds since epoch; not_after exclusive.
struct ValidTime {
  int64_t not_before_ms = 0;
  int64_t not_after_ms = 0;
  bool contains(int64_t now_ms) const { return now_ms >= not_before_ms && now_ms < not_after_ms; }
  bool operator==(const ValidTime&) const = default;
};

// The certificate content that is hashed into the certificate id and signed
// by the provider: who grants what on which work to whom, for how long,
// anchored by the owner's signature over the work.
struct CertificateInfo {
  std::string owner_did;
  std::string provider_did;
  std::string enduser_did;
  std::string multimedia_id;
  AccessRights rights;
  ValidTime valid_time;
  Signature owner_sig{};

  // Fields in the order above, each length-prefixed, concatenated. This is a
  // cross-module wire contract: signer and verifier must produce identical
  // bytes.
  Bytes canonical_bytes() const;
  Hash32 cert_id() const { return sha256(canonical_bytes()); }
};

struct AccessCertificate {
  Hash32 cert_id{};
  CertificateInfo info;
  Signature provider_sig{};
  Hash32 content_hash{}; // snapshot of the work's hash at issuance, so the
                         // certificate stays verifiable after deregistration
  bool issued = true;
};

// On-chain authorization records, keyed by the hash of their content.
// Certificates are immutable; there is no revocation operation — early
// invalidation happens only through DID revocation, which breaks signature
// resolution at verification time.
class CertificateRegistry {
public:
  // Issuance checks the caller is the work's provider, enforces the
  // id-equals-hash binding, requires a nonempty rights set, and appends the
  // certificate id to the work's access log in the same state transition.
  ApplyResult issue(const Address& caller, const Hash32& cert_id,
                    const std::string& multimedia_id, const std::string& provider_did,
                    const std::string& enduser_did, const Signature& owner_sig,
                    AccessRights rights, ValidTime valid_time, const Signature& provider_sig,
                    MultimediaRegistry& media);

  const AccessCertificate* get(const Hash32& cert_id) const;

  size_t size() const { return records_.size(); }
  void encode_state(wire::Encoder& enc) const;
  nlohmann::json record_json(const AccessCertificate& c) const;

private:
  std::map<std::string, AccessCertificate> records_; // keyed by hex cert id
};

struct CertIssueArgs {
  Hash32 cert_id{};
  std::string multimedia_id;
  std::string provider_did;
  std::string enduser_did;
  Signature owner_sig{};
  uint8_t rights_mask = 0;
  ValidTime valid_time;
  Signature provider_sig{};
  Bytes encode() const;
  static CertIssueArgs decode(const Bytes& payload);
};

} // namespace mdm
