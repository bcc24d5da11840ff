#pragma once

#include "mdm/node.hpp"

#include <functional>
#include <memory>
#include <thread>

namespace httplib {
class Server;
}

namespace mdm {

struct GatewayConfig {
  std::string host = "127.0.0.1";
  int port = 0; // 0: pick any free port
  int worker_threads = 64;
};

// HTTP facade over one node: every state-changing endpoint submits a signed
// transaction and answers only after it commits, so a client's next read
// observes its own write. Reads answer from the committed snapshot and
// never create transactions.
//
//   POST /did/register            did-registry.register
//   GET  /did/resolve?did=        DID resolution
//   GET  /did/record?did=         full registry record
//   POST /did/update              did-registry.update_ddo
//   POST /did/revoke              did-registry.revoke
//   POST /agreement/generate      agreement-registry.generate
//   POST /agreement/owner-sign    agreement-registry.owner_sign
//   POST /agreement/provider-sign agreement-registry.provider_sign
//   GET  /agreement/get?id=
//   POST /media/register          multimedia-registry.register
//   POST /media/approve           multimedia-registry.approve
//   POST /media/deregister        multimedia-registry.deregister (+ blob cleanup)
//   POST /media/log-access        multimedia-registry.log_access
//   GET  /media/record?id=
//   GET  /media/access-log?id=
//   POST /access/token            access request -> token (signed envelope)
//   POST /access/verify           token verification (public, always 200)
//   POST /access/redeem           token -> content bytes
//   POST /store/upload            off-chain blob upload (signed envelope)
//   GET  /chain/tip               height, state root
//   GET  /chain/nonce?account=
//   GET  /chain/query?registry=&key=
class Gateway {
public:
  // Grants are auto-approved when the requested rights are inside the
  // settled agreement's copyrights set; replaceable for stricter policies.
  using GrantPolicy = std::function<bool(const Agreement&, const AccessRights&)>;

  Gateway(Node& node, GatewayConfig cfg);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  // Throws Error("port-in-use") when the configured port cannot be bound.
  int start();
  void stop();
  int port() const { return port_; }

  void set_grant_policy(GrantPolicy policy) { grant_policy_ = std::move(policy); }

private:
  void install_routes();

  Node& node_;
  GatewayConfig cfg_;
  GrantPolicy grant_policy_;
  std::unique_ptr<httplib::Server> server_;
  std::thread serve_thread_;
  int port_ = 0;
};

} // namespace mdm
