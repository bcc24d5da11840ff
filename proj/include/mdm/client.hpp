#pragma once

#include "mdm/agreement_registry.hpp"
#include "mdm/certificate_registry.hpp"
#include "mdm/chain.hpp"
#include "mdm/common.hpp"
#include "mdm/crypto.hpp"
#include "mdm/did_registry.hpp"
#include "mdm/multimedia_registry.hpp"
#include "mdm/rights.hpp"

#include <json.hpp>

#include <memory>

namespace httplib {
class Client;
}

namespace mdm {

struct WriteResult {
  std::string status; // ok | reverted
  uint64_t height = 0;
  std::string reason;
  bool ok() const { return status == "ok"; }
};

// HTTP client for the gateway. Builds, signs and submits transactions from
// a local account; secret keys never leave the process. One instance per
// thread: the underlying connection is not shareable.
class GatewayClient {
public:
  GatewayClient(const std::string& host, int port);
  ~GatewayClient();

  uint64_t next_nonce(const Address& account);
  nlohmann::json chain_tip();

  // Posts a pre-built signed transaction to its endpoint; throws Error on
  // rejection. The typed helpers below fetch the nonce and build the
  // transaction themselves.
  WriteResult submit_tx(const std::string& path, const Transaction& tx);

  // transaction submissions (synchronous: return after commit)
  WriteResult did_register(const Account& signer, const std::string& did,
                           const std::string& ddo);
  WriteResult did_update(const Account& signer, const std::string& did, const std::string& ddo);
  WriteResult did_revoke(const Account& signer, const std::string& did);
  WriteResult agreement_generate(const Account& signer, const AgreementGenerateArgs& args);
  WriteResult agreement_sign(const Account& signer, const std::string& id, const Signature& sig,
                             bool as_owner);
  WriteResult media_register(const Account& signer, const MediaRegisterArgs& args);
  WriteResult media_approve(const Account& signer, const MediaApproveArgs& args);
  WriteResult media_deregister(const Account& signer, const std::string& id);
  WriteResult media_log_access(const Account& signer, const std::string& id,
                               const Hash32& cert_id);

  // reads
  std::optional<std::string> did_resolve(const std::string& did, std::string* err = nullptr);
  std::optional<nlohmann::json> did_record(const std::string& did);
  std::optional<nlohmann::json> agreement_get(const std::string& id);
  std::optional<nlohmann::json> media_record(const std::string& id);
  std::optional<nlohmann::json> media_access_log(const std::string& id);
  std::optional<nlohmann::json> chain_query(const std::string& registry, const std::string& key,
                                            std::string* err = nullptr);

  // off-chain and access management
  nlohmann::json upload(const Account& signer, const Bytes& data, const std::string& kind);
  nlohmann::json request_access(const Account& enduser, const std::string& enduser_did,
                                const std::string& multimedia_id,
                                const std::vector<std::string>& rights, int64_t duration_ms);
  nlohmann::json verify_token(const std::string& token);
  // Returns content bytes; throws Error with the gateway's error code.
  Bytes redeem(const std::string& token);

private:
  WriteResult post_tx(const std::string& path, const Account& signer,
                      const std::string& registry, const std::string& op, Bytes payload);
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body,
                           int* status = nullptr);
  std::optional<nlohmann::json> get_json(const std::string& path, std::string* err = nullptr);

  std::unique_ptr<httplib::Client> http_;
};

} // namespace mdm
