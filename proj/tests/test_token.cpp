#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "reference_verifier.hpp"
#include "mdm/store.hpp"
#include "mdm/token.hpp"

#include <filesystem>

using namespace mdm;
namespace fs = std::filesystem;

namespace {

constexpr int64_t kNow = 1'700'000'000'000;

struct Fix {
  std::string dir;
  Ledger ledger;
  BlobStore store;
  TokenEngine engine;
  test::Pipeline p;
  AccessRights rights = AccessRights::from_csv("publication,broadcasting").value();
  ValidTime window{kNow, kNow + 3'600'000};

  Fix()
      : dir((fs::temp_directory_path() / ("mdm-token-test-" + std::to_string(::getpid()))).string()),
        ledger(ChainConfig{}),
        store((fs::remove_all(dir), dir)),
        engine(ledger, store) {
    p = test::run_pipeline(ledger);
    store.put(p.content, "multimedia-source");
  }
  ~Fix() { fs::remove_all(dir); }

  TokenEngine::Grant grant(ValidTime w = ValidTime{}, AccessRights r = AccessRights{}) {
    if (w.not_after_ms == 0) w = window;
    if (r.empty()) r = rights;
    auto g = engine.generate(p.provider, p.owner_did, p.provider_did, p.enduser_did, p.media_id,
                             r, w, kNow, false);
    test::seal_all(ledger);
    REQUIRE(g.issue_tx->poll()->ok());
    return g;
  }

  test::RefOutcome oracle(const std::string& token, int64_t now) {
    return ledger.read(
        [&](const Registries& s) { return test::reference_verify(s, token, now); });
  }
};

} // namespace

TEST_CASE("happy path: generated token passes all six steps, certificate lands on-chain") {
  Fix f;
  uint64_t log_before =
      f.ledger.read([&](const Registries& s) { return s.multimedia.get(f.p.media_id)->access_log.size(); });
  auto grant = f.grant();

  VerificationReport report = f.engine.verify(grant.encoded, kNow + 1000);
  CHECK(report.accepted);
  CHECK(report.failed_step == 0);
  REQUIRE(report.steps.size() == 6);
  for (const auto& s : report.steps) CHECK(s.ok);

  // oracle agrees
  CHECK(f.oracle(grant.encoded, kNow + 1000).accepted);

  f.ledger.read([&](const Registries& s) {
    const AccessCertificate* cert = s.certificates.get(grant.cert_id);
    REQUIRE(cert != nullptr);
    CHECK(cert->info.enduser_did == f.p.enduser_did);
    CHECK(cert->info.rights == f.rights);
    CHECK(cert->content_hash == f.p.content_hash);
    // the access log grew by exactly this certificate
    const auto& log = s.multimedia.get(f.p.media_id)->access_log;
    REQUIRE(log.size() == log_before + 1);
    CHECK(log.back() == grant.cert_id);
    return 0;
  });
}

TEST_CASE("token wire format round-trips byte-exactly") {
  Fix f;
  auto grant = f.grant();
  auto decoded = AccessToken::decode(grant.encoded);
  REQUIRE(decoded.has_value());
  CHECK(*decoded == grant.token);
  CHECK(decoded->encode() == grant.encoded);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    AccessToken t;
    auto id_bytes = test::random_bytes(rng, 32, 32);
    std::copy(id_bytes.begin(), id_bytes.end(), t.cert_id.begin());
    t.provider_did = "did:mdm:" + to_hex(test::random_bytes(rng, 20, 20));
    auto sig_bytes = test::random_bytes(rng, 64, 64);
    std::copy(sig_bytes.begin(), sig_bytes.end(), t.provider_sig.begin());
    t.valid_time = {static_cast<int64_t>(rng() % kNow), static_cast<int64_t>(rng() % kNow)};
    auto back = AccessToken::decode(t.encode());
    REQUIRE(back.has_value());
    CHECK(*back == t);
    CHECK(back->encode() == t.encode());
  }
}

TEST_CASE("generation preconditions") {
  Fix f;
  SUBCASE("unapproved work") {
    // a second, unapproved registration
    Hash32 h = sha256("unapproved content");
    MediaRegisterArgs reg;
    reg.id = "media-unapproved";
    reg.owner_did = f.p.owner_did;
    reg.content_hash = h;
    reg.owner_sig = sign(f.p.owner.secret_key, std::span<const uint8_t>(h.data(), h.size()));
    reg.upload_ref = locator_for(h);
    REQUIRE(test::apply_tx(f.ledger, f.p.owner, "multimedia-registry", "register", reg.encode())
                .ok());
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.provider, f.p.owner_did, f.p.provider_did,
                                           f.p.enduser_did, "media-unapproved", f.rights,
                                           f.window, kNow, false),
                         doctest::Contains("not-approved"), Error);
  }
  SUBCASE("party mismatch") {
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.provider, f.p.enduser_did, f.p.provider_did,
                                           f.p.enduser_did, f.p.media_id, f.rights, f.window,
                                           kNow, false),
                         doctest::Contains("party-mismatch"), Error);
    // the wrong signing key is a party mismatch too: the engine signs for
    // the record's provider account only
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.enduser, f.p.owner_did, f.p.provider_did,
                                           f.p.enduser_did, f.p.media_id, f.rights, f.window,
                                           kNow, false),
                         doctest::Contains("party-mismatch"), Error);
  }
  SUBCASE("unknown end user") {
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.provider, f.p.owner_did, f.p.provider_did,
                                           "did:mdm:00000000000000000000ffffffffffffffffffff",
                                           f.p.media_id, f.rights, f.window, kNow, false),
                         doctest::Contains("unknown-enduser"), Error);
  }
  SUBCASE("empty rights") {
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.provider, f.p.owner_did, f.p.provider_did,
                                           f.p.enduser_did, f.p.media_id, AccessRights{},
                                           f.window, kNow, false),
                         doctest::Contains("empty-rights"), Error);
  }
  SUBCASE("window already over") {
    CHECK_THROWS_WITH_AS(f.engine.generate(f.p.provider, f.p.owner_did, f.p.provider_did,
                                           f.p.enduser_did, f.p.media_id, f.rights,
                                           ValidTime{kNow - 2000, kNow - 1000}, kNow, false),
                         doctest::Contains("expired-window"), Error);
  }
}

TEST_CASE("identical inputs produce the identical certificate id") {
  Fix f;
  auto grant = f.grant();
  // independent recomputation from the on-chain record
  Hash32 recomputed = f.ledger.read([&](const Registries& s) {
    return test::reference_cert_id(*s.certificates.get(grant.cert_id));
  });
  CHECK(recomputed == grant.cert_id);

  // a second generation with the same inputs derives the same id, and the
  // duplicate issuance reverts
  auto dup = f.engine.generate(f.p.provider, f.p.owner_did, f.p.provider_did, f.p.enduser_did,
                               f.p.media_id, f.rights, f.window, kNow, false);
  CHECK(dup.cert_id == grant.cert_id);
  test::seal_all(f.ledger);
  CHECK(dup.issue_tx->poll()->reason == "already-issued");
}

TEST_CASE("expiry boundary is closed-open") {
  Fix f;
  auto grant = f.grant();
  CHECK(f.engine.verify(grant.encoded, f.window.not_before_ms).accepted);
  CHECK(f.engine.verify(grant.encoded, f.window.not_after_ms - 1).accepted);

  VerificationReport at_end = f.engine.verify(grant.encoded, f.window.not_after_ms);
  CHECK_FALSE(at_end.accepted);
  CHECK(at_end.failed_step == 2);
  CHECK(f.engine.verify(grant.encoded, f.window.not_after_ms + 5000).failed_step == 2);
  CHECK(f.engine.verify(grant.encoded, f.window.not_before_ms - 1).failed_step == 2);

  // oracle agrees on every boundary
  CHECK(f.oracle(grant.encoded, f.window.not_before_ms).accepted);
  CHECK(f.oracle(grant.encoded, f.window.not_after_ms - 1).accepted);
  CHECK(f.oracle(grant.encoded, f.window.not_after_ms).failed_step == 2);
}

TEST_CASE("verification pinpoints the failing step") {
  Fix f;
  auto grant = f.grant();

  SUBCASE("garbage input fails decode") {
    CHECK(f.engine.verify("", kNow).failed_step == 1);
    CHECK(f.engine.verify("not a token", kNow).failed_step == 1);
    CHECK(f.engine.verify("a.b.c", kNow).failed_step == 1);
  }
  SUBCASE("unknown certificate fails the lookup") {
    AccessToken t = grant.token;
    t.cert_id[0] ^= 0xff;
    CHECK(f.engine.verify(t.encode(), kNow).failed_step == 3);
  }
  SUBCASE("signature differing from the on-chain record fails equality") {
    AccessToken t = grant.token;
    t.provider_sig[0] ^= 0x01;
    CHECK(f.engine.verify(t.encode(), kNow).failed_step == 4);
  }
  SUBCASE("window differing from the on-chain record fails equality") {
    AccessToken t = grant.token;
    t.valid_time.not_after_ms += 1;
    CHECK(f.engine.verify(t.encode(), kNow).failed_step == 4);
  }
  SUBCASE("provider DID differing from the record fails equality") {
    AccessToken t = grant.token;
    t.provider_did = f.p.owner_did;
    CHECK(f.engine.verify(t.encode(), kNow).failed_step == 4);
  }
  SUBCASE("provider DID revocation breaks key resolution") {
    REQUIRE(test::apply_tx(f.ledger, f.p.provider, "did-registry", "revoke",
                           DidRevokeArgs{f.p.provider_did}.encode())
                .ok());
    VerificationReport r = f.engine.verify(grant.encoded, kNow);
    CHECK_FALSE(r.accepted);
    CHECK(r.failed_step == 5);
    CHECK(f.oracle(grant.encoded, kNow).failed_step == 5);
  }
  SUBCASE("owner DID revocation breaks the owner check") {
    REQUIRE(test::apply_tx(f.ledger, f.p.owner, "did-registry", "revoke",
                           DidRevokeArgs{f.p.owner_did}.encode())
                .ok());
    VerificationReport r = f.engine.verify(grant.encoded, kNow);
    CHECK(r.failed_step == 6);
    CHECK(f.oracle(grant.encoded, kNow).failed_step == 6);
  }
  SUBCASE("provider key rotation invalidates old signatures at step 5") {
    Account fresh = test::account(77);
    std::string new_ddo = make_ddo(f.p.provider_did, fresh.public_key).canonical();
    REQUIRE(test::apply_tx(f.ledger, f.p.provider, "did-registry", "update_ddo",
                           DidUpdateArgs{f.p.provider_did, new_ddo}.encode())
                .ok());
    CHECK(f.engine.verify(grant.encoded, kNow).failed_step == 5);
    CHECK(f.oracle(grant.encoded, kNow).failed_step == 5);
  }
}

TEST_CASE("single-byte mutations are never accepted, oracle and engine agree") {
  Fix f;
  auto grant = f.grant();
  const std::string& base = grant.encoded;
  REQUIRE(f.engine.verify(base, kNow).accepted);

  std::mt19937_64 rng(41);
  int mutants = 0;
  for (size_t pos = 0; pos < base.size(); ++pos) {
    for (int k = 0; k < 2; ++k) {
      std::string mutated = base;
      char replacement;
      do {
        replacement = static_cast<char>(rng() % 94 + 33); // printable, never same
      } while (replacement == base[pos]);
      mutated[pos] = replacement;
      ++mutants;

      VerificationReport engine_says = f.engine.verify(mutated, kNow);
      test::RefOutcome oracle_says = f.oracle(mutated, kNow);
      CHECK_FALSE(engine_says.accepted);
      CHECK_FALSE(oracle_says.accepted);
      CHECK(engine_says.failed_step == oracle_says.failed_step);
    }
  }
  CHECK(mutants >= 400);
}

TEST_CASE("redeem returns the exact content and catches corruption") {
  Fix f;
  auto grant = f.grant();

  Bytes got = f.engine.redeem(grant.encoded, kNow);
  CHECK(got == f.p.content);
  CHECK(sha256(got) == f.p.content_hash);

  SUBCASE("verification failure propagates with the step") {
    CHECK_THROWS_WITH_AS(f.engine.redeem(grant.encoded, f.window.not_after_ms),
                         doctest::Contains("step 2"), Error);
  }
  SUBCASE("deregistration leaves the certificate verifiable but unservable") {
    REQUIRE(test::apply_tx(f.ledger, f.p.owner, "multimedia-registry", "deregister",
                           MediaDeregisterArgs{f.p.media_id}.encode())
                .ok());
    CHECK(f.engine.verify(grant.encoded, kNow).accepted); // still verifies
    CHECK_THROWS_WITH_AS(f.engine.redeem(grant.encoded, kNow),
                         doctest::Contains("content-missing"), Error);
  }
  SUBCASE("missing blob") {
    f.store.remove(f.p.content_hash);
    CHECK_THROWS_WITH_AS(f.engine.redeem(grant.encoded, kNow),
                         doctest::Contains("content-missing"), Error);
  }
  SUBCASE("corrupted blob fails closed") {
    std::string path = f.store.blob_path(f.p.content_hash);
    {
      std::fstream file(path, std::ios::in | std::ios::out | std::ios::binary);
      REQUIRE(file.good());
      file.seekp(3);
      char c;
      file.seekg(3);
      file.get(c);
      file.seekp(3);
      file.put(static_cast<char>(c ^ 0x40));
    }
    CHECK_THROWS_WITH_AS(f.engine.redeem(grant.encoded, kNow),
                         doctest::Contains("content-integrity"), Error);
  }
}

TEST_CASE("audit completeness: the access log equals the issued certificates in order") {
  Fix f;
  std::vector<Hash32> issued;
  for (int i = 0; i < 8; ++i) {
    ValidTime w{kNow, kNow + 3'600'000 + i}; // distinct windows, distinct ids
    issued.push_back(f.grant(w).cert_id);
  }
  auto log = f.ledger.read(
      [&](const Registries& s) { return s.multimedia.get(f.p.media_id)->access_log; });
  CHECK(log == issued);
}

TEST_CASE("direct issuance guards") {
  Fix f;
  auto grant = f.grant(); // something real on-chain

  CertIssueArgs args;
  args.multimedia_id = f.p.media_id;
  args.provider_did = f.p.provider_did;
  args.enduser_did = f.p.enduser_did;
  args.owner_sig = f.ledger.read(
      [&](const Registries& s) { return s.multimedia.get(f.p.media_id)->owner_sig; });
  args.rights_mask = f.rights.mask;
  args.valid_time = {kNow, kNow + 60'000};

  CertificateInfo info;
  info.owner_did = f.p.owner_did;
  info.provider_did = args.provider_did;
  info.enduser_did = args.enduser_did;
  info.multimedia_id = args.multimedia_id;
  info.rights = f.rights;
  info.valid_time = args.valid_time;
  info.owner_sig = args.owner_sig;
  args.cert_id = info.cert_id();
  args.provider_sig = sign(f.p.provider.secret_key, info.canonical_bytes());

  SUBCASE("non-provider cannot issue") {
    CHECK(test::apply_tx(f.ledger, f.p.enduser, "access-certificates", "issue_cert",
                         args.encode())
              .reason == "not-provider");
  }
  SUBCASE("certificate id must hash its content") {
    auto bad = args;
    bad.cert_id[5] ^= 0x10;
    CHECK(test::apply_tx(f.ledger, f.p.provider, "access-certificates", "issue_cert",
                         bad.encode())
              .reason == "cert-id-mismatch");
  }
  SUBCASE("empty rights revert") {
    auto bad = args;
    bad.rights_mask = 0;
    CHECK(test::apply_tx(f.ledger, f.p.provider, "access-certificates", "issue_cert",
                         bad.encode())
              .reason == "empty-rights");
  }
  SUBCASE("valid direct issuance works and re-issuance reverts") {
    CHECK(test::apply_tx(f.ledger, f.p.provider, "access-certificates", "issue_cert",
                         args.encode())
              .ok());
    CHECK(test::apply_tx(f.ledger, f.p.provider, "access-certificates", "issue_cert",
                         args.encode())
              .reason == "already-issued");
  }
  (void)grant;
}
