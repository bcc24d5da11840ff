#include "mdm/ledger.hpp"

#include <filesystem>
#include <fstream>

namespace mdm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
Block make_genesis(const Registries& empty_state) {
  Block g;
  g.height = 0;
  g.parent_hash = Hash32{};
  g.timestamp_ms = 0;
  g.state_root = empty_state.state_root();
  g.block_hash = g.compute_hash();
  return g;
}
} // namespace

Ledger::Ledger(ChainConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.block_interval_ms <= 0) throw Error("bad-config", "block interval must be > 0");
  uint32_t max_weight = cfg_.default_weight;
  for (const auto& [op, w] : cfg_.op_weights) max_weight = std::max(max_weight, w);
  if (cfg_.block_capacity < max_weight)
    throw Error("bad-config", "a transaction heavier than the block capacity could never seal");
  crypto_init();
  chain_.push_back(make_genesis(state_));
  if (!cfg_.data_dir.empty()) {
    fs::create_directories(cfg_.data_dir);
    block_file_ = (fs::path(cfg_.data_dir) / "chain.ndjson").string();
    if (fs::exists(block_file_))
      load_existing_chain();
    else
      persist_block(chain_.front());
  }
}

void Ledger::load_existing_chain() {
  auto log = load_block_file(block_file_);
  if (log.empty()) {
    persist_block(chain_.front());
    return;
  }
  // rebuild committed state by re-executing the log; any corruption fails
  // startup rather than silently diverging
  Registries rebuilt;
  Hash32 parent = Hash32{};
  std::vector<Block> chain;
  for (const auto& b : log) {
    if (b.height != chain.size()) throw Error("corrupt-log", "height gap");
    if (b.parent_hash != parent) throw Error("corrupt-log", "broken parent link");
    for (const auto& st : b.txs) {
      if (!st.tx.verify_signature()) throw Error("corrupt-log", "bad transaction signature");
      if (st.tx.nonce != rebuilt.committed_nonce(st.tx.sender) + 1)
        throw Error("corrupt-log", "nonce out of order");
      auto revert = rebuilt.apply(st.tx);
      TxStatus got = revert ? TxStatus::Reverted : TxStatus::Ok;
      if (got != st.status) throw Error("corrupt-log", "execution outcome mismatch");
    }
    if (rebuilt.state_root() != b.state_root) throw Error("corrupt-log", "state root mismatch");
    if (b.compute_hash() != b.block_hash) throw Error("corrupt-log", "block hash mismatch");
    parent = b.block_hash;
    chain.push_back(b);
  }
  state_ = std::move(rebuilt);
  chain_ = std::move(chain);
}

std::shared_ptr<TxHandle> Ledger::submit(Transaction tx) {
  auto handle = std::make_shared<TxHandle>();
  auto reject = [&](const std::string& reason) {
    handle->resolve({TxStatus::Rejected, 0, reason});
    return handle;
  };

  if (!tx.verify_signature()) return reject("bad-signature");
  tx.weight = cfg_.weight_for(tx.registry, tx.op);

  uint64_t committed;
  {
    std::shared_lock lk(state_mu_);
    committed = state_.committed_nonce(tx.sender);
  }
  std::lock_guard lk(pool_mu_);
  if (pool_.size() >= cfg_.pool_limit) return reject("pool-full");
  auto it = pending_nonce_.find(tx.sender);
  uint64_t expected = (it == pending_nonce_.end() ? committed : std::max(committed, it->second)) + 1;
  if (tx.nonce != expected) return reject("stale-nonce");
  pending_nonce_[tx.sender] = tx.nonce;
  pool_.push_back({std::move(tx), handle});
  return handle;
}

std::optional<Block> Ledger::seal_tick(int64_t now_ms) {
  std::vector<PoolEntry> batch;
  {
    std::lock_guard plk(pool_mu_);
    {
      std::shared_lock slk(state_mu_);
      if (now_ms - chain_.back().timestamp_ms < cfg_.block_interval_ms) return std::nullopt;
    }
    if (pool_.empty()) return std::nullopt;
    uint64_t used = 0;
    while (!pool_.empty() && used + pool_.front().tx.weight <= cfg_.block_capacity) {
      used += pool_.front().tx.weight;
      batch.push_back(std::move(pool_.front()));
      pool_.pop_front();
    }
    // pending_nonce_ entries for drained senders stay put until the
    // committed counters catch up; clearing them here would let a racing
    // submit reuse a nonce still in flight
  }
  if (batch.empty()) return std::nullopt;

  Block b;
  std::vector<std::pair<std::shared_ptr<TxHandle>, TxResult>> resolutions;
  {
    std::unique_lock lk(state_mu_);
    b.height = chain_.size();
    b.parent_hash = chain_.back().block_hash;
    b.timestamp_ms = now_ms;
    for (auto& entry : batch) {
      SealedTx st;
      auto revert = state_.apply(entry.tx);
      st.status = revert ? TxStatus::Reverted : TxStatus::Ok;
      st.reason = revert.value_or("");
      st.tx = std::move(entry.tx);
      resolutions.emplace_back(std::move(entry.handle),
                               TxResult{st.status, b.height, st.reason});
      b.txs.push_back(std::move(st));
    }
    b.state_root = state_.state_root();
    b.block_hash = b.compute_hash();
    chain_.push_back(b);
  }
  persist_block(b);
  for (auto& [handle, result] : resolutions) handle->resolve(std::move(result));
  return b;
}

uint64_t Ledger::expected_nonce(const Address& sender) const {
  uint64_t committed;
  {
    std::shared_lock lk(state_mu_);
    committed = state_.committed_nonce(sender);
  }
  std::lock_guard lk(pool_mu_);
  auto it = pending_nonce_.find(sender);
  return (it == pending_nonce_.end() ? committed : std::max(committed, it->second)) + 1;
}

uint64_t Ledger::height() const {
  std::shared_lock lk(state_mu_);
  return chain_.back().height;
}

Hash32 Ledger::tip_state_root() const {
  std::shared_lock lk(state_mu_);
  return chain_.back().state_root;
}

Hash32 Ledger::tip_block_hash() const {
  std::shared_lock lk(state_mu_);
  return chain_.back().block_hash;
}

int64_t Ledger::last_block_time_ms() const {
  std::shared_lock lk(state_mu_);
  return chain_.back().timestamp_ms;
}

size_t Ledger::pool_size() const {
  std::lock_guard lk(pool_mu_);
  return pool_.size();
}

json Ledger::query(const std::string& registry, const std::string& key) const {
  std::shared_lock lk(state_mu_);
  return state_.query(registry, key);
}

std::vector<Block> Ledger::blocks() const {
  std::shared_lock lk(state_mu_);
  return chain_;
}

ReplayResult Ledger::replay(const std::vector<Block>& log) {
  Registries state;
  ReplayResult res;
  res.tip_state_root = state.state_root(); // genesis root for an empty log
  Hash32 parent{};
  uint64_t next_height = 0;
  for (const auto& b : log) {
    if (b.height != next_height) throw Error("corrupt-log", "height gap");
    if (b.parent_hash != parent) throw Error("corrupt-log", "broken parent link");
    for (const auto& st : b.txs) {
      if (!st.tx.verify_signature()) throw Error("corrupt-log", "bad transaction signature");
      if (st.tx.nonce != state.committed_nonce(st.tx.sender) + 1)
        throw Error("corrupt-log", "nonce out of order");
      auto revert = state.apply(st.tx);
      TxStatus got = revert ? TxStatus::Reverted : TxStatus::Ok;
      if (got != st.status) throw Error("corrupt-log", "execution outcome mismatch");
      ++res.applied;
      if (revert) ++res.reverted;
    }
    if (state.state_root() != b.state_root) throw Error("corrupt-log", "state root mismatch");
    if (b.compute_hash() != b.block_hash) throw Error("corrupt-log", "block hash mismatch");
    parent = b.block_hash;
    res.height = b.height;
    res.tip_state_root = b.state_root;
    ++next_height;
  }
  return res;
}

std::vector<Block> Ledger::load_block_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("corrupt-log", "cannot open " + path);
  std::vector<Block> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error("corrupt-log", "bad block line");
    out.push_back(Block::from_json(j));
  }
  return out;
}

void Ledger::persist_block(const Block& b) {
  if (block_file_.empty()) return;
  std::ofstream out(block_file_, std::ios::app);
  if (!out) throw Error("io", "cannot append to " + block_file_);
  out << b.to_json().dump() << "\n";
}

} // namespace mdm
