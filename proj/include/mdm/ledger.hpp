#pragma once

#include "mdm/chain.hpp"
#include "mdm/registries.hpp"

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace mdm {

// Resolves once the transaction has been sealed into a block (or was
// rejected at submission).
class TxHandle {
public:
  TxResult wait() {
    std::unique_lock lk(m_);
    cv_.wait(lk, [&] { return result_.status != TxStatus::Pending; });
    return result_;
  }
  std::optional<TxResult> poll() {
    std::lock_guard lk(m_);
    if (result_.status == TxStatus::Pending) return std::nullopt;
    return result_;
  }

private:
  friend class Ledger;
  void resolve(TxResult r) {
    {
      std::lock_guard lk(m_);
      result_ = std::move(r);
    }
    cv_.notify_all();
  }
  std::mutex m_;
  std::condition_variable cv_;
  TxResult result_;
};

struct ReplayResult {
  Hash32 tip_state_root{};
  uint64_t height = 0;
  uint64_t applied = 0;
  uint64_t reverted = 0;
};

// Embedded single-authority ledger. One sealing thread owns the state
// transition; submissions go through a synchronized pool, reads see the
// last committed state only. Blocks are appended to an NDJSON log under
// data_dir when one is configured.
class Ledger {
public:
  explicit Ledger(ChainConfig cfg);

  // Validates signature and nonce; on failure returns a handle already
  // resolved as Rejected ("bad-signature" | "stale-nonce" | "pool-full").
  std::shared_ptr<TxHandle> submit(Transaction tx);

  // Seals a block when the interval has elapsed and the pool is nonempty:
  // drains the pool FIFO up to block capacity, applies each transaction in
  // order (reverted ones consume their slot, change nothing), recomputes the
  // state root and appends the block.
  std::optional<Block> seal_tick(int64_t now_ms);

  // Next acceptable nonce for a sender, counting queued transactions.
  uint64_t expected_nonce(const Address& sender) const;

  uint64_t height() const;
  Hash32 tip_state_root() const;
  Hash32 tip_block_hash() const;
  int64_t last_block_time_ms() const;
  size_t pool_size() const;
  const ChainConfig& config() const { return cfg_; }

  // Runs fn over the committed registries under a shared lock.
  template <typename F>
  auto read(F&& fn) const {
    std::shared_lock lk(state_mu_);
    return fn(static_cast<const Registries&>(state_));
  }

  // Committed-state lookup; throws Error("unknown-registry" | "not-found").
  nlohmann::json query(const std::string& registry, const std::string& key) const;

  std::vector<Block> blocks() const; // committed history, genesis first

  // Rebuilds state from an exported block log, re-validating every
  // signature, nonce, execution outcome, state root and hash link. Throws
  // Error("corrupt-log") on any mismatch.
  static ReplayResult replay(const std::vector<Block>& log);

  static std::vector<Block> load_block_file(const std::string& path);

private:
  struct PoolEntry {
    Transaction tx;
    std::shared_ptr<TxHandle> handle;
  };

  void persist_block(const Block& b);
  void load_existing_chain();

  ChainConfig cfg_;
  std::string block_file_;

  mutable std::mutex pool_mu_;
  std::deque<PoolEntry> pool_;
  std::map<Address, uint64_t> pending_nonce_; // highest queued nonce per sender

  mutable std::shared_mutex state_mu_;
  Registries state_;
  std::vector<Block> chain_;
};

} // namespace mdm
