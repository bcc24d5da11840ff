#pragma once

#include "mdm/common.hpp"
#include "mdm/crypto.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace mdm {

// A signed state-changing call into one registry operation. The payload is
// the canonical encoding of the operation arguments; the signature covers
// (sender, nonce, registry, op, payload). The public key travels with the
// transaction since Ed25519 signatures do not allow key recovery; the
// sender address must equal the address derived from it.
struct Transaction {
  Address sender{};
  PublicKey sender_pubkey{};
  uint64_t nonce = 0;
  std::string registry;
  std::string op;
  Bytes payload;
  Signature sig{};
  uint32_t weight = 1; // cost units, assigned by the ledger at submission

  Bytes signing_bytes() const;
  Hash32 hash() const;
  bool verify_signature() const;

  static Transaction make_signed(const Account& from, uint64_t nonce,
                                 const std::string& registry, const std::string& op,
                                 Bytes payload);

  nlohmann::json to_json() const;
  static Transaction from_json(const nlohmann::json& j);
};

enum class TxStatus { Pending, Ok, Reverted, Rejected };
std::string to_string(TxStatus s);

struct TxResult {
  TxStatus status = TxStatus::Pending;
  uint64_t height = 0;     // block that sealed the transaction
  std::string reason;      // revert or rejection reason
  bool ok() const { return status == TxStatus::Ok; }
};

// A transaction as sealed into a block, with its execution outcome. Reverted
// transactions stay in the block but left the state untouched.
struct SealedTx {
  Transaction tx;
  TxStatus status = TxStatus::Ok;
  std::string reason;
};

struct Block {
  uint64_t height = 0;
  Hash32 parent_hash{};
  int64_t timestamp_ms = 0;
  std::vector<SealedTx> txs;
  Hash32 state_root{};
  Hash32 block_hash{};

  Hash32 compute_hash() const;

  nlohmann::json to_json() const;
  static Block from_json(const nlohmann::json& j);
};

struct ChainConfig {
  int64_t block_interval_ms = 1000;
  uint64_t block_capacity = 200;           // weight units per block
  uint32_t default_weight = 1;
  std::map<std::string, uint32_t> op_weights; // "registry.op" -> weight
  size_t pool_limit = 100000;
  std::string data_dir;                    // empty: in-memory only
  std::string authority_name = "authority"; // sealer key file stem under data_dir

  uint32_t weight_for(const std::string& registry, const std::string& op) const;
};

} // namespace mdm
