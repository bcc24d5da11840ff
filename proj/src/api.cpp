#include "mdm/api.hpp"

#include "mdm/wire.hpp"

namespace mdm {

using nlohmann::json;

Bytes envelope_signing_bytes(const Address& account, uint64_t nonce,
                             const std::string& body_text) {
  wire::Encoder enc;
  enc.put_str("mdm-req-v1").put_fixed(account).put_u64(nonce).put_str(body_text);
  return enc.take();
}

json make_envelope(const Account& signer, const json& body) {
  uint64_t nonce = static_cast<uint64_t>(now_ms());
  Signature sig =
      sign(signer.secret_key, envelope_signing_bytes(signer.address, nonce, body.dump()));
  json env;
  env["account"] = to_hex(signer.address);
  env["pubkey"] = to_hex(signer.public_key);
  env["nonce"] = nonce;
  env["body"] = body;
  env["sig"] = to_hex(sig);
  return env;
}

std::optional<Address> verify_envelope(const json& envelope, json* body_out, std::string* err) {
  auto fail = [&](const std::string& why) -> std::optional<Address> {
    if (err) *err = why;
    return std::nullopt;
  };
  if (!envelope.is_object()) return fail("bad-envelope");
  for (const char* field : {"account", "pubkey", "nonce", "body", "sig"})
    if (!envelope.contains(field)) return fail("bad-envelope");
  auto account = from_hex_fixed<20>(envelope["account"].get<std::string>());
  auto pubkey = from_hex_fixed<32>(envelope["pubkey"].get<std::string>());
  auto sig = from_hex_fixed<64>(envelope["sig"].get<std::string>());
  if (!account || !pubkey || !sig || !envelope["nonce"].is_number_unsigned())
    return fail("bad-envelope");
  if (derive_address(*pubkey) != *account) return fail("bad-signature");
  uint64_t nonce = envelope["nonce"].get<uint64_t>();
  Bytes msg = envelope_signing_bytes(*account, nonce, envelope["body"].dump());
  if (!verify(*pubkey, msg, *sig)) return fail("bad-signature");
  if (body_out) *body_out = envelope["body"];
  return account;
}

} // namespace mdm
