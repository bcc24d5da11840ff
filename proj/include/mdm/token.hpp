#pragma once

#include "mdm/certificate_registry.hpp"
#include "mdm/common.hpp"
#include "mdm/ledger.hpp"
#include "mdm/store.hpp"

#include <json.hpp>

namespace mdm {

// Compact bearer credential handed to the end user off-chain. Exactly four
// fields travel: the certificate id, the provider DID, the provider
// signature and the validity window. Encoded as three dot-separated
// unpadded base64url segments: a version header, the claims, the raw
// signature bytes.
struct AccessToken {
  Hash32 cert_id{};
  std::string provider_did;
  Signature provider_sig{};
  ValidTime valid_time;

  std::string encode() const;
  static std::optional<AccessToken> decode(const std::string& text);
  bool operator==(const AccessToken&) const = default;
};

struct VerifyStep {
  int step = 0;
  std::string name;
  bool ok = false;
  std::string detail;
};

// Outcome of the six verification steps, in order: decode, validity window,
// on-chain lookup, on-chain equality, provider signature, owner signature.
// Steps after the first failure are not executed.
struct VerificationReport {
  bool accepted = false;
  int failed_step = 0; // 0 when accepted
  std::vector<VerifyStep> steps;
  nlohmann::json to_json() const;
};

// Orchestrates token generation against the ledger (certificate issuance is
// an on-chain transaction under the provider's key) and evaluates tokens
// against committed state. Verification never throws on hostile input.
class TokenEngine {
public:
  TokenEngine(Ledger& ledger, BlobStore& store) : ledger_(ledger), store_(store) {}

  struct Grant {
    AccessToken token;
    Hash32 cert_id{};
    std::string encoded;
    std::shared_ptr<TxHandle> issue_tx;
  };

  // Builds and signs the certificate, submits the issuance transaction and
  // (when wait is true) blocks until it commits. Throws Error with codes
  // not-approved | party-mismatch | unknown-enduser | empty-rights |
  // expired-window | issue-failed.
  Grant generate(const Account& provider_key, const std::string& owner_did,
                 const std::string& provider_did, const std::string& enduser_did,
                 const std::string& multimedia_id, AccessRights rights, ValidTime valid_time,
                 int64_t now, bool wait = true);

  VerificationReport verify(const std::string& encoded_token, int64_t now) const;

  // Verifies, then serves the work's bytes from the off-chain store and
  // checks them against the on-chain content hash. Throws Error with codes
  // verification-failed | content-missing | content-integrity.
  Bytes redeem(const std::string& encoded_token, int64_t now) const;

private:
  Ledger& ledger_;
  BlobStore& store_;
  std::mutex submit_mu_; // serializes nonce assignment per engine
};

} // namespace mdm
