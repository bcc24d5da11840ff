#include "mdm/node.hpp"

#include <filesystem>
#include <fstream>

namespace mdm {

namespace fs = std::filesystem;
using nlohmann::json;

NodeConfig NodeConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("bad-config", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error("bad-config", "invalid JSON in " + path);
  NodeConfig cfg;
  cfg.chain.block_interval_ms = j.value("block_interval_ms", cfg.chain.block_interval_ms);
  cfg.chain.block_capacity = j.value("block_capacity", cfg.chain.block_capacity);
  cfg.chain.default_weight = j.value("default_weight", cfg.chain.default_weight);
  cfg.chain.pool_limit = j.value("pool_limit", cfg.chain.pool_limit);
  cfg.chain.data_dir = j.value("data_dir", cfg.chain.data_dir);
  if (j.contains("op_weights"))
    for (const auto& [k, v] : j["op_weights"].items())
      cfg.chain.op_weights[k] = v.get<uint32_t>();
  cfg.store_dir = j.value("store_dir", cfg.store_dir);
  cfg.keystore_dir = j.value("keystore_dir", cfg.keystore_dir);
  return cfg;
}

json NodeConfig::to_json() const {
  json j;
  j["block_interval_ms"] = chain.block_interval_ms;
  j["block_capacity"] = chain.block_capacity;
  j["default_weight"] = chain.default_weight;
  j["pool_limit"] = chain.pool_limit;
  j["data_dir"] = chain.data_dir;
  j["store_dir"] = store_dir;
  j["keystore_dir"] = keystore_dir;
  if (!chain.op_weights.empty()) {
    json w;
    for (const auto& [k, v] : chain.op_weights) w[k] = v;
    j["op_weights"] = w;
  }
  return j;
}

Node::Node(NodeConfig cfg) : cfg_(std::move(cfg)) {
  // chain parameter invariants are enforced by the Ledger constructor
  if (cfg_.store_dir.empty())
    cfg_.store_dir = cfg_.chain.data_dir.empty()
                         ? "mdm-store"
                         : (fs::path(cfg_.chain.data_dir) / "store").string();
  if (cfg_.keystore_dir.empty())
    cfg_.keystore_dir = cfg_.chain.data_dir.empty()
                            ? "mdm-keys"
                            : (fs::path(cfg_.chain.data_dir) / "keys").string();
  ledger_ = std::make_unique<Ledger>(cfg_.chain);
  store_ = std::make_unique<BlobStore>(cfg_.store_dir);
  tokens_ = std::make_unique<TokenEngine>(*ledger_, *store_);
  keystore_ = std::make_unique<Keystore>(cfg_.keystore_dir);

  // the sealing authority's key lives with the node data
  if (!keystore_->load(cfg_.chain.authority_name))
    keystore_->create(cfg_.chain.authority_name);
}

Node::~Node() { stop_sealer(); }

void Node::start_sealer() {
  if (running_.exchange(true)) return;
  sealer_ = std::thread([this] {
    while (running_.load()) {
      ledger_->seal_tick(now_ms());
      // wake often enough that a block lands promptly once the interval
      // elapses, without busy-spinning
      int64_t nap = std::min<int64_t>(std::max<int64_t>(cfg_.chain.block_interval_ms / 20, 1), 25);
      std::this_thread::sleep_for(std::chrono::milliseconds(nap));
    }
  });
}

void Node::stop_sealer() {
  if (!running_.exchange(false)) return;
  if (sealer_.joinable()) sealer_.join();
}

void Node::drain_pool() {
  if (running_.load()) throw Error("sealer-running", "drain_pool needs the sealer stopped");
  while (ledger_->pool_size() > 0)
    ledger_->seal_tick(ledger_->last_block_time_ms() + cfg_.chain.block_interval_ms);
}

} // namespace mdm
