#include "mdm/chain.hpp"

#include "mdm/wire.hpp"

namespace mdm {

using nlohmann::json;

Bytes Transaction::signing_bytes() const {
  wire::Encoder enc;
  enc.put_str("mdm-tx-v1")
      .put_fixed(sender)
      .put_u64(nonce)
      .put_str(registry)
      .put_str(op)
      .put_bytes(payload);
  return enc.take();
}

Hash32 Transaction::hash() const {
  wire::Encoder enc;
  enc.put_bytes(signing_bytes()).put_fixed(sig);
  return sha256(enc.bytes());
}

bool Transaction::verify_signature() const {
  if (derive_address(sender_pubkey) != sender) return false;
  return verify(sender_pubkey, signing_bytes(), sig);
}

Transaction Transaction::make_signed(const Account& from, uint64_t nonce,
                                     const std::string& registry, const std::string& op,
                                     Bytes payload) {
  Transaction tx;
  tx.sender = from.address;
  tx.sender_pubkey = from.public_key;
  tx.nonce = nonce;
  tx.registry = registry;
  tx.op = op;
  tx.payload = std::move(payload);
  tx.sig = sign(from.secret_key, tx.signing_bytes());
  return tx;
}

json Transaction::to_json() const {
  json j;
  j["sender"] = to_hex(sender);
  j["pubkey"] = to_hex(sender_pubkey);
  j["nonce"] = nonce;
  j["registry"] = registry;
  j["op"] = op;
  j["payload"] = to_hex(payload);
  j["sig"] = to_hex(sig);
  j["weight"] = weight;
  return j;
}

Transaction Transaction::from_json(const json& j) {
  Transaction tx;
  auto sender = from_hex_fixed<20>(j.at("sender").get<std::string>());
  auto pubkey = from_hex_fixed<32>(j.at("pubkey").get<std::string>());
  auto sig = from_hex_fixed<64>(j.at("sig").get<std::string>());
  auto payload = from_hex(j.at("payload").get<std::string>());
  if (!sender || !pubkey || !sig || !payload) throw Error("decode", "bad transaction encoding");
  tx.sender = *sender;
  tx.sender_pubkey = *pubkey;
  tx.nonce = j.at("nonce").get<uint64_t>();
  tx.registry = j.at("registry").get<std::string>();
  tx.op = j.at("op").get<std::string>();
  tx.payload = *payload;
  tx.sig = *sig;
  tx.weight = j.value("weight", 1u);
  return tx;
}

std::string to_string(TxStatus s) {
  switch (s) {
    case TxStatus::Pending: return "pending";
    case TxStatus::Ok: return "ok";
    case TxStatus::Reverted: return "reverted";
    case TxStatus::Rejected: return "rejected";
  }
  return "unknown";
}

Hash32 Block::compute_hash() const {
  // transactions commit into the header through the concatenation of their
  // individual hashes
  Bytes tx_hashes;
  for (const auto& st : txs) {
    Hash32 h = st.tx.hash();
    tx_hashes.insert(tx_hashes.end(), h.begin(), h.end());
  }
  wire::Encoder enc;
  enc.put_str("mdm-block-v1")
      .put_u64(height)
      .put_fixed(parent_hash)
      .put_i64(timestamp_ms)
      .put_fixed(state_root)
      .put_u64(txs.size())
      .put_bytes(tx_hashes);
  return sha256(enc.bytes());
}

json Block::to_json() const {
  json jtxs = json::array();
  for (const auto& st : txs) {
    json jt = st.tx.to_json();
    jt["status"] = to_string(st.status);
    if (!st.reason.empty()) jt["reason"] = st.reason;
    jtxs.push_back(std::move(jt));
  }
  json j;
  j["height"] = height;
  j["parent_hash"] = to_hex(parent_hash);
  j["timestamp_ms"] = timestamp_ms;
  j["state_root"] = to_hex(state_root);
  j["block_hash"] = to_hex(block_hash);
  j["txs"] = std::move(jtxs);
  return j;
}

Block Block::from_json(const json& j) {
  Block b;
  b.height = j.at("height").get<uint64_t>();
  auto parent = from_hex_fixed<32>(j.at("parent_hash").get<std::string>());
  auto root = from_hex_fixed<32>(j.at("state_root").get<std::string>());
  auto hash = from_hex_fixed<32>(j.at("block_hash").get<std::string>());
  if (!parent || !root || !hash) throw Error("decode", "bad block encoding");
  b.parent_hash = *parent;
  b.timestamp_ms = j.at("timestamp_ms").get<int64_t>();
  b.state_root = *root;
  b.block_hash = *hash;
  for (const auto& jt : j.at("txs")) {
    SealedTx st;
    st.tx = Transaction::from_json(jt);
    std::string status = jt.at("status").get<std::string>();
    if (status == "ok")
      st.status = TxStatus::Ok;
    else if (status == "reverted")
      st.status = TxStatus::Reverted;
    else
      throw Error("decode", "bad sealed status: " + status);
    st.reason = jt.value("reason", "");
    b.txs.push_back(std::move(st));
  }
  return b;
}

uint32_t ChainConfig::weight_for(const std::string& registry, const std::string& op) const {
  auto it = op_weights.find(registry + "." + op);
  return it == op_weights.end() ? default_weight : it->second;
}

} // namespace mdm
