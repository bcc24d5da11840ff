#pragma once

#include "mdm/common.hpp"
#include "mdm/did_registry.hpp"
#include "mdm/wire.hpp"

#include <json.hpp>

#include <map>

namespace mdm {

// Copyright licensing record between a multimedia owner and a service
// provider. Settles when both signatures land; settled records are frozen.
struct Agreement {
  std::string id;
  std::string owner_did;
  Address owner_account{};
  std::string provider_did;
  Address provider_account{}; // the drafting caller
  Hash32 agreement_hash{};    // hash of the off-chain agreement document
  uint64_t valid_time_s = 0;  // validity period of the agreement itself
  std::string copyrights;     // comma-joined sorted right names
  Signature owner_sig{};
  Signature provider_sig{};
  bool owner_signed = false;
  bool provider_signed = false;
  bool settled = false;
};

// Bytes both parties sign: all business fields, so a signature cannot be
// replayed onto different terms. Must be identical on the signing client
// and the verifying registry.
Bytes agreement_signing_bytes(const std::string& id, const std::string& owner_did,
                              const std::string& provider_did, const Hash32& agreement_hash,
                              uint64_t valid_time_s, const std::string& copyrights);

class AgreementRegistry {
public:
  // Drafting (re)creates the record unsigned; the caller is recorded as the
  // provider party. Rejected once the id has settled.
  ApplyResult generate(const Address& caller, const std::string& id,
                       const std::string& owner_did, const Address& owner_account,
                       const std::string& provider_did, const Hash32& agreement_hash,
                       uint64_t valid_time_s, const std::string& copyrights,
                       const DidRegistry& dids);
  // Signatures are verified at apply time against the party's DDO key over
  // agreement_signing_bytes.
  ApplyResult owner_sign(const Address& caller, const std::string& id, const Signature& sig,
                         const DidRegistry& dids);
  ApplyResult provider_sign(const Address& caller, const std::string& id, const Signature& sig,
                            const DidRegistry& dids);

  const Agreement* get(const std::string& id) const;
  // Settled agreement whose document hash matches, if any.
  const Agreement* find_settled_by_hash(const Hash32& agreement_hash) const;

  size_t size() const { return records_.size(); }
  void encode_state(wire::Encoder& enc) const;
  nlohmann::json record_json(const Agreement& a) const;

private:
  ApplyResult sign_impl(const Address& caller, const std::string& id, const Signature& sig,
                        const DidRegistry& dids, bool as_owner);
  std::map<std::string, Agreement> records_;
};

struct AgreementGenerateArgs {
  std::string id;
  std::string owner_did;
  Address owner_account{};
  std::string provider_did;
  Hash32 agreement_hash{};
  uint64_t valid_time_s = 0;
  std::string copyrights;
  Bytes encode() const;
  static AgreementGenerateArgs decode(const Bytes& payload);
};

struct AgreementSignArgs {
  std::string id;
  Signature sig{};
  Bytes encode() const;
  static AgreementSignArgs decode(const Bytes& payload);
};

} // namespace mdm
