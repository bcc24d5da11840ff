#include "mdm/token.hpp"

namespace mdm {

using nlohmann::json;

std::string AccessToken::encode() const {
  json header;
  header["alg"] = "Ed25519";
  header["ver"] = 1;
  json claims;
  claims["cert"] = to_hex(cert_id);
  claims["not_after"] = valid_time.not_after_ms;
  claims["not_before"] = valid_time.not_before_ms;
  claims["provider"] = provider_did;
  std::string h = header.dump();
  std::string c = claims.dump();
  return base64url_encode(reinterpret_cast<const uint8_t*>(h.data()), h.size()) + "." +
         base64url_encode(reinterpret_cast<const uint8_t*>(c.data()), c.size()) + "." +
         base64url_encode(provider_sig.data(), provider_sig.size());
}

std::optional<AccessToken> AccessToken::decode(const std::string& text) {
  size_t dot1 = text.find('.');
  if (dot1 == std::string::npos) return std::nullopt;
  size_t dot2 = text.find('.', dot1 + 1);
  if (dot2 == std::string::npos) return std::nullopt;
  if (text.find('.', dot2 + 1) != std::string::npos) return std::nullopt;

  auto header_bytes = base64url_decode(std::string_view(text).substr(0, dot1));
  auto claim_bytes = base64url_decode(std::string_view(text).substr(dot1 + 1, dot2 - dot1 - 1));
  auto sig_bytes = base64url_decode(std::string_view(text).substr(dot2 + 1));
  if (!header_bytes || !claim_bytes || !sig_bytes) return std::nullopt;
  if (sig_bytes->size() != 64) return std::nullopt;

  json header = json::parse(to_string(*header_bytes), nullptr, false);
  if (header.is_discarded() || !header.is_object()) return std::nullopt;
  if (header.value("alg", "") != "Ed25519" || header.value("ver", 0) != 1) return std::nullopt;

  json claims = json::parse(to_string(*claim_bytes), nullptr, false);
  if (claims.is_discarded() || !claims.is_object()) return std::nullopt;
  if (!claims.contains("cert") || !claims["cert"].is_string()) return std::nullopt;
  if (!claims.contains("provider") || !claims["provider"].is_string()) return std::nullopt;
  if (!claims.contains("not_before") || !claims["not_before"].is_number_integer())
    return std::nullopt;
  if (!claims.contains("not_after") || !claims["not_after"].is_number_integer())
    return std::nullopt;

  auto cert = from_hex_fixed<32>(claims["cert"].get<std::string>());
  if (!cert) return std::nullopt;

  AccessToken t;
  t.cert_id = *cert;
  t.provider_did = claims["provider"].get<std::string>();
  t.valid_time.not_before_ms = claims["not_before"].get<int64_t>();
  t.valid_time.not_after_ms = claims["not_after"].get<int64_t>();
  std::copy(sig_bytes->begin(), sig_bytes->end(), t.provider_sig.begin());
  // only the canonical encoding is a token: every byte string decodes to at
  // most one credential, so no two distinct texts alias the same token
  if (t.encode() != text) return std::nullopt;
  return t;
}

json VerificationReport::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    json js;
    js["step"] = s.step;
    js["name"] = s.name;
    js["ok"] = s.ok;
    if (!s.detail.empty()) js["detail"] = s.detail;
    steps_json.push_back(std::move(js));
  }
  json j;
  j["accepted"] = accepted;
  j["failed_step"] = failed_step;
  j["steps"] = std::move(steps_json);
  return j;
}

TokenEngine::Grant TokenEngine::generate(const Account& provider_key,
                                         const std::string& owner_did,
                                         const std::string& provider_did,
                                         const std::string& enduser_did,
                                         const std::string& multimedia_id, AccessRights rights,
                                         ValidTime valid_time, int64_t now, bool wait) {
  if (rights.empty()) throw Error("empty-rights");
  if (valid_time.not_after_ms <= now) throw Error("expired-window");

  // snapshot the work and the parties from committed state
  CertificateInfo info;
  ledger_.read([&](const Registries& state) {
    const MultimediaRecord* rec = state.multimedia.get(multimedia_id);
    if (!rec) throw Error("not-approved", "no such multimedia id");
    if (!rec->approved) throw Error("not-approved");
    if (rec->owner_did != owner_did || rec->provider_did != provider_did ||
        rec->provider_account != provider_key.address)
      throw Error("party-mismatch");
    if (!state.dids.resolve(enduser_did)) throw Error("unknown-enduser");
    info.owner_sig = rec->owner_sig;
    return 0;
  });
  info.owner_did = owner_did;
  info.provider_did = provider_did;
  info.enduser_did = enduser_did;
  info.multimedia_id = multimedia_id;
  info.rights = rights;
  info.valid_time = valid_time;

  Bytes canonical = info.canonical_bytes();
  Hash32 cert_id = sha256(canonical);
  Signature provider_sig = sign(provider_key.secret_key, canonical);

  CertIssueArgs args;
  args.cert_id = cert_id;
  args.multimedia_id = multimedia_id;
  args.provider_did = provider_did;
  args.enduser_did = enduser_did;
  args.owner_sig = info.owner_sig;
  args.rights_mask = rights.mask;
  args.valid_time = valid_time;
  args.provider_sig = provider_sig;

  std::shared_ptr<TxHandle> handle;
  {
    std::lock_guard lk(submit_mu_);
    Transaction tx = Transaction::make_signed(provider_key,
                                              ledger_.expected_nonce(provider_key.address),
                                              "access-certificates", "issue_cert", args.encode());
    handle = ledger_.submit(std::move(tx));
  }
  if (wait) {
    TxResult r = handle->wait();
    if (!r.ok()) throw Error("issue-failed", r.reason);
  }

  Grant g;
  g.token.cert_id = cert_id;
  g.token.provider_did = provider_did;
  g.token.provider_sig = provider_sig;
  g.token.valid_time = valid_time;
  g.cert_id = cert_id;
  g.encoded = g.token.encode();
  g.issue_tx = std::move(handle);
  return g;
}

VerificationReport TokenEngine::verify(const std::string& encoded_token, int64_t now) const {
  VerificationReport report;
  auto fail = [&](int step, const std::string& name, const std::string& detail) {
    report.steps.push_back({step, name, false, detail});
    report.failed_step = step;
    report.accepted = false;
    return report;
  };
  auto pass = [&](int step, const std::string& name) {
    report.steps.push_back({step, name, true, ""});
  };

  // 1. decode
  auto token = AccessToken::decode(encoded_token);
  if (!token) return fail(1, "decode", "token is not a well-formed credential");
  pass(1, "decode");

  // 2. validity window, [not_before, not_after)
  if (!token->valid_time.contains(now))
    return fail(2, "validity-window", now < token->valid_time.not_before_ms
                                          ? "token not yet valid"
                                          : "token expired");
  pass(2, "validity-window");

  return ledger_.read([&](const Registries& state) {
    // 3. certificate lookup
    const AccessCertificate* cert = state.certificates.get(token->cert_id);
    if (!cert) return fail(3, "certificate-lookup", "no certificate for this id");
    pass(3, "certificate-lookup");

    // 4. token fields must equal the on-chain record
    if (cert->provider_sig != token->provider_sig)
      return fail(4, "onchain-equality", "provider signature differs from certificate");
    if (cert->info.provider_did != token->provider_did)
      return fail(4, "onchain-equality", "provider DID differs from certificate");
    if (!(cert->info.valid_time == token->valid_time))
      return fail(4, "onchain-equality", "validity window differs from certificate");
    pass(4, "onchain-equality");

    // 5. provider signature over the recombined certificate content
    auto provider_key = state.dids.verification_key(cert->info.provider_did);
    if (!provider_key)
      return fail(5, "provider-signature", "provider DID does not resolve to a key");
    if (!mdm::verify(*provider_key, cert->info.canonical_bytes(), cert->provider_sig))
      return fail(5, "provider-signature", "signature does not verify");
    pass(5, "provider-signature");

    // 6. owner signature over the work's content hash
    auto owner_key = state.dids.verification_key(cert->info.owner_did);
    if (!owner_key) return fail(6, "owner-signature", "owner DID does not resolve to a key");
    if (!mdm::verify(*owner_key,
                std::span<const uint8_t>(cert->content_hash.data(), cert->content_hash.size()),
                cert->info.owner_sig))
      return fail(6, "owner-signature", "signature does not verify");
    pass(6, "owner-signature");

    report.accepted = true;
    report.failed_step = 0;
    return report;
  });
}

Bytes TokenEngine::redeem(const std::string& encoded_token, int64_t now) const {
  VerificationReport report = verify(encoded_token, now);
  if (!report.accepted)
    throw Error("verification-failed", "step " + std::to_string(report.failed_step));

  auto token = AccessToken::decode(encoded_token); // accepted, so it decodes
  struct Located {
    Hash32 content_hash{};
    std::string upload_ref;
  } loc;
  ledger_.read([&](const Registries& state) {
    const AccessCertificate* cert = state.certificates.get(token->cert_id);
    if (!cert) throw Error("content-missing", "certificate vanished");
    const MultimediaRecord* rec = state.multimedia.get(cert->info.multimedia_id);
    if (!rec) throw Error("content-missing", "multimedia record deregistered");
    if (rec->content_hash != cert->content_hash)
      throw Error("content-missing", "certified content replaced");
    loc.content_hash = rec->content_hash;
    loc.upload_ref = rec->upload_ref;
    return 0;
  });

  auto ref_hash = parse_locator(loc.upload_ref);
  if (!ref_hash) throw Error("content-missing", "bad locator " + loc.upload_ref);
  auto bytes = store_.get(*ref_hash);
  if (!bytes) throw Error("content-missing", loc.upload_ref);
  if (sha256(*bytes) != loc.content_hash)
    throw Error("content-integrity", "stored bytes do not hash to the on-chain value");
  return *bytes;
}

} // namespace mdm
