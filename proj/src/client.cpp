#include "mdm/client.hpp"

#include "mdm/api.hpp"
#include "mdm/chain.hpp"

#include <httplib.h>

namespace mdm {

using nlohmann::json;

GatewayClient::GatewayClient(const std::string& host, int port) {
  http_ = std::make_unique<httplib::Client>(host, port);
  http_->set_connection_timeout(10);
  // writes block until the transaction commits, which can span several
  // block intervals under load
  http_->set_read_timeout(300);
  http_->set_keep_alive(true);
}

GatewayClient::~GatewayClient() = default;

json GatewayClient::post_json(const std::string& path, const json& body, int* status) {
  auto res = http_->Post(path, body.dump(), "application/json");
  if (!res) throw Error("gateway-unreachable", path + ": " + httplib::to_string(res.error()));
  if (status) *status = res->status;
  json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw Error("bad-response", path);
  return j;
}

std::optional<json> GatewayClient::get_json(const std::string& path, std::string* err) {
  auto res = http_->Get(path);
  if (!res) throw Error("gateway-unreachable", path + ": " + httplib::to_string(res.error()));
  json j = json::parse(res->body, nullptr, false);
  if (res->status != 200) {
    if (err) *err = j.is_discarded() ? "bad-response" : j.value("error", "bad-response");
    return std::nullopt;
  }
  if (j.is_discarded()) throw Error("bad-response", path);
  return j;
}

uint64_t GatewayClient::next_nonce(const Address& account) {
  auto j = get_json("/chain/nonce?account=" + to_hex(account));
  if (!j) throw Error("bad-response", "/chain/nonce");
  return (*j)["next_nonce"].get<uint64_t>();
}

json GatewayClient::chain_tip() {
  auto j = get_json("/chain/tip");
  if (!j) throw Error("bad-response", "/chain/tip");
  return *j;
}

WriteResult GatewayClient::submit_tx(const std::string& path, const Transaction& tx) {
  json body;
  body["tx"] = tx.to_json();
  int status = 0;
  json res = post_json(path, body, &status);
  if (status != 200) throw Error(res.value("error", "bad-response"), res.value("detail", path));
  WriteResult r;
  r.status = res.value("status", "");
  r.height = res.value("height", uint64_t{0});
  r.reason = res.value("reason", "");
  return r;
}

WriteResult GatewayClient::post_tx(const std::string& path, const Account& signer,
                                   const std::string& registry, const std::string& op,
                                   Bytes payload) {
  return submit_tx(path, Transaction::make_signed(signer, next_nonce(signer.address), registry,
                                                  op, std::move(payload)));
}

WriteResult GatewayClient::did_register(const Account& signer, const std::string& did,
                                        const std::string& ddo) {
  DidRegisterArgs args{signer.address, did, ddo};
  return post_tx("/did/register", signer, "did-registry", "register", args.encode());
}

WriteResult GatewayClient::did_update(const Account& signer, const std::string& did,
                                      const std::string& ddo) {
  DidUpdateArgs args{did, ddo};
  return post_tx("/did/update", signer, "did-registry", "update_ddo", args.encode());
}

WriteResult GatewayClient::did_revoke(const Account& signer, const std::string& did) {
  DidRevokeArgs args{did};
  return post_tx("/did/revoke", signer, "did-registry", "revoke", args.encode());
}

WriteResult GatewayClient::agreement_generate(const Account& signer,
                                              const AgreementGenerateArgs& args) {
  return post_tx("/agreement/generate", signer, "agreement-registry", "generate", args.encode());
}

WriteResult GatewayClient::agreement_sign(const Account& signer, const std::string& id,
                                          const Signature& sig, bool as_owner) {
  AgreementSignArgs args{id, sig};
  return post_tx(as_owner ? "/agreement/owner-sign" : "/agreement/provider-sign", signer,
                 "agreement-registry", as_owner ? "owner_sign" : "provider_sign", args.encode());
}

WriteResult GatewayClient::media_register(const Account& signer, const MediaRegisterArgs& args) {
  return post_tx("/media/register", signer, "multimedia-registry", "register", args.encode());
}

WriteResult GatewayClient::media_approve(const Account& signer, const MediaApproveArgs& args) {
  return post_tx("/media/approve", signer, "multimedia-registry", "approve", args.encode());
}

WriteResult GatewayClient::media_deregister(const Account& signer, const std::string& id) {
  MediaDeregisterArgs args{id};
  return post_tx("/media/deregister", signer, "multimedia-registry", "deregister", args.encode());
}

WriteResult GatewayClient::media_log_access(const Account& signer, const std::string& id,
                                            const Hash32& cert_id) {
  MediaLogAccessArgs args{id, cert_id};
  return post_tx("/media/log-access", signer, "multimedia-registry", "log_access", args.encode());
}

std::optional<std::string> GatewayClient::did_resolve(const std::string& did, std::string* err) {
  auto j = get_json("/did/resolve?did=" + httplib::detail::encode_url(did), err);
  if (!j) return std::nullopt;
  return (*j)["ddo"].get<std::string>();
}

std::optional<json> GatewayClient::did_record(const std::string& did) {
  auto j = get_json("/did/record?did=" + httplib::detail::encode_url(did));
  if (!j) return std::nullopt;
  return (*j)["record"];
}

std::optional<json> GatewayClient::agreement_get(const std::string& id) {
  auto j = get_json("/agreement/get?id=" + httplib::detail::encode_url(id));
  if (!j) return std::nullopt;
  return (*j)["agreement"];
}

std::optional<json> GatewayClient::media_record(const std::string& id) {
  auto j = get_json("/media/record?id=" + httplib::detail::encode_url(id));
  if (!j) return std::nullopt;
  return (*j)["record"];
}

std::optional<json> GatewayClient::media_access_log(const std::string& id) {
  return get_json("/media/access-log?id=" + httplib::detail::encode_url(id));
}

std::optional<json> GatewayClient::chain_query(const std::string& registry,
                                               const std::string& key, std::string* err) {
  auto j = get_json("/chain/query?registry=" + httplib::detail::encode_url(registry) +
                        "&key=" + httplib::detail::encode_url(key),
                    err);
  if (!j) return std::nullopt;
  return (*j)["value"];
}

json GatewayClient::upload(const Account& signer, const Bytes& data, const std::string& kind) {
  json body;
  body["data"] = base64url_encode(data);
  body["kind"] = kind;
  int status = 0;
  json res = post_json("/store/upload", make_envelope(signer, body), &status);
  if (status != 200) throw Error(res.value("error", "bad-response"), res.value("detail", ""));
  return res;
}

json GatewayClient::request_access(const Account& enduser, const std::string& enduser_did,
                                   const std::string& multimedia_id,
                                   const std::vector<std::string>& rights, int64_t duration_ms) {
  json body;
  body["enduser_did"] = enduser_did;
  body["multimedia_id"] = multimedia_id;
  body["rights"] = rights;
  body["duration_ms"] = duration_ms;
  int status = 0;
  json res = post_json("/access/token", make_envelope(enduser, body), &status);
  if (status != 200) throw Error(res.value("error", "bad-response"), res.value("detail", ""));
  return res;
}

json GatewayClient::verify_token(const std::string& token) {
  json body;
  body["token"] = token;
  return post_json("/access/verify", body);
}

Bytes GatewayClient::redeem(const std::string& token) {
  json body;
  body["token"] = token;
  auto res = http_->Post("/access/redeem", body.dump(), "application/json");
  if (!res) throw Error("gateway-unreachable", "/access/redeem");
  if (res->status != 200) {
    json j = json::parse(res->body, nullptr, false);
    throw Error(j.is_discarded() ? "bad-response" : j.value("error", "bad-response"),
                j.is_discarded() ? "" : j.value("detail", ""));
  }
  return Bytes(res->body.begin(), res->body.end());
}

} // namespace mdm
