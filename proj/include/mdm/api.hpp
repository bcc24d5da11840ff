#pragma once

#include "mdm/common.hpp"
#include "mdm/crypto.hpp"

#include <json.hpp>

namespace mdm {

// Authentication envelope for service requests that are not themselves
// ledger transactions (access requests, uploads): the caller signs
// (address, nonce, body) with its account key, the same trust anchor the
// on-chain modifiers use.
Bytes envelope_signing_bytes(const Address& account, uint64_t nonce,
                             const std::string& body_text);

nlohmann::json make_envelope(const Account& signer, const nlohmann::json& body);

// Returns the authenticated address, or nullopt with err set
// ("bad-envelope" | "bad-signature").
std::optional<Address> verify_envelope(const nlohmann::json& envelope, nlohmann::json* body_out,
                                       std::string* err);

} // namespace mdm
