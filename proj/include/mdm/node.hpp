#pragma once

#include "mdm/keystore.hpp"
#include "mdm/ledger.hpp"
#include "mdm/store.hpp"
#include "mdm/token.hpp"

#include <atomic>
#include <memory>
#include <thread>

namespace mdm {

struct NodeConfig {
  ChainConfig chain;
  std::string store_dir;
  std::string keystore_dir; // provider keys the gateway may grant with
  static NodeConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

// One platform node: the ledger, the off-chain store, the token engine and
// the sealing loop. The sealer is the single thread driving seal_tick;
// everything else only submits and reads.
class Node {
public:
  explicit Node(NodeConfig cfg);
  ~Node();

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  void start_sealer();
  void stop_sealer();
  // Drives sealing with a synthetic clock instead of the wall clock; test
  // and fixture-seeding helper. Seals until the pool drains.
  void drain_pool();

  Ledger& ledger() { return *ledger_; }
  BlobStore& store() { return *store_; }
  TokenEngine& tokens() { return *tokens_; }
  Keystore& keystore() { return *keystore_; }
  const NodeConfig& config() const { return cfg_; }

private:
  NodeConfig cfg_;
  std::unique_ptr<Ledger> ledger_;
  std::unique_ptr<BlobStore> store_;
  std::unique_ptr<TokenEngine> tokens_;
  std::unique_ptr<Keystore> keystore_;
  std::thread sealer_;
  std::atomic<bool> running_{false};
};

} // namespace mdm
