#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mdm/api.hpp"
#include "mdm/client.hpp"
#include "mdm/gateway.hpp"
#include "mdm/token.hpp"

#include <httplib.h>

#include <filesystem>

using namespace mdm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// node with a fast sealer behind a real HTTP gateway on a free port
struct Gate {
  std::string dir;
  NodeConfig cfg;
  Node node;
  Gateway gateway;
  int port;

  static NodeConfig make_cfg(const std::string& dir) {
    NodeConfig c;
    c.chain.block_interval_ms = 50;
    c.chain.block_capacity = 200;
    c.chain.data_dir = dir;
    return c;
  }

  Gate()
      : dir((fs::temp_directory_path() / ("mdm-gw-test-" + std::to_string(::getpid()))).string()),
        cfg((fs::remove_all(dir), make_cfg(dir))),
        node(cfg),
        gateway(node, GatewayConfig{"127.0.0.1", 0, 16}),
        port((node.start_sealer(), gateway.start())) {}
  ~Gate() {
    gateway.stop();
    node.stop_sealer();
    fs::remove_all(dir);
  }

  GatewayClient client() { return GatewayClient("127.0.0.1", port); }
};

struct Trio {
  Account owner = test::account(1);
  Account provider = test::account(2);
  Account enduser = test::account(3);
  std::string owner_did, provider_did, enduser_did;
};

// the whole copyright-licensing flow over the HTTP surface only
Trio run_flow_over_http(Gate& g, GatewayClient& client, const Bytes& content,
                        const std::string& media_id = "track-1") {
  Trio t;
  t.owner_did = did_for_address(t.owner.address);
  t.provider_did = did_for_address(t.provider.address);
  t.enduser_did = did_for_address(t.enduser.address);

  REQUIRE(client.did_register(t.owner, t.owner_did,
                              make_ddo(t.owner_did, t.owner.public_key).canonical())
              .ok());
  REQUIRE(client.did_register(t.provider, t.provider_did,
                              make_ddo(t.provider_did, t.provider.public_key).canonical())
              .ok());
  REQUIRE(client.did_register(t.enduser, t.enduser_did,
                              make_ddo(t.enduser_did, t.enduser.public_key,
                                       "https://enduser.example/inbox")
                                  .canonical())
              .ok());

  json up = client.upload(t.owner, content, "multimedia-source");
  Hash32 hash = sha256(content);
  REQUIRE(up["content_hash"] == to_hex(hash));

  MediaRegisterArgs media;
  media.id = media_id;
  media.owner_did = t.owner_did;
  media.content_hash = hash;
  media.owner_sig = sign(t.owner.secret_key, std::span<const uint8_t>(hash.data(), hash.size()));
  media.upload_ref = up["locator"].get<std::string>();
  REQUIRE(client.media_register(t.owner, media).ok());

  AgreementGenerateArgs agr;
  agr.id = media_id + "-agreement";
  agr.owner_did = t.owner_did;
  agr.owner_account = t.owner.address;
  agr.provider_did = t.provider_did;
  agr.agreement_hash = sha256("license for " + media_id);
  agr.valid_time_s = 3600;
  agr.copyrights = "broadcasting,publication";
  REQUIRE(client.agreement_generate(t.provider, agr).ok());

  Bytes msg = agreement_signing_bytes(agr.id, agr.owner_did, agr.provider_did,
                                      agr.agreement_hash, agr.valid_time_s, agr.copyrights);
  REQUIRE(client.agreement_sign(t.owner, agr.id, sign(t.owner.secret_key, msg), true).ok());
  REQUIRE(client.agreement_sign(t.provider, agr.id, sign(t.provider.secret_key, msg), false).ok());

  MediaApproveArgs app;
  app.id = media_id;
  app.provider_did = t.provider_did;
  app.agreement_hash = agr.agreement_hash;
  REQUIRE(client.media_approve(t.provider, app).ok());

  // the gateway grants on the provider's behalf
  KeystoreEntry pe;
  pe.name = "provider";
  pe.did = t.provider_did;
  pe.account = t.provider;
  g.node.keystore().save(pe);
  return t;
}

} // namespace

TEST_CASE("DID registration round-trips through resolution, byte-identical") {
  Gate g;
  auto client = g.client();
  Account acc = test::account(9);
  std::string did = did_for_address(acc.address);
  std::string ddo = make_ddo(did, acc.public_key, "https://me.example").canonical();

  WriteResult w = client.did_register(acc, did, ddo);
  CHECK(w.ok());
  CHECK(w.height >= 1);

  // synchronous confirmation: the write is immediately visible
  auto got = client.did_resolve(did);
  REQUIRE(got.has_value());
  CHECK(*got == ddo);

  std::string err;
  CHECK_FALSE(client.did_resolve("did:mdm:unknown0000000000000000000000000000", &err).has_value());
  CHECK(err == "not-found");
}

TEST_CASE("reverted transactions surface status and reason") {
  Gate g;
  auto client = g.client();
  Account acc = test::account(9);
  std::string did = did_for_address(acc.address);
  std::string ddo = make_ddo(did, acc.public_key).canonical();
  REQUIRE(client.did_register(acc, did, ddo).ok());

  WriteResult dup = client.did_register(acc, did, ddo);
  CHECK(dup.status == "reverted");
  CHECK(dup.reason == "already-registered");
}

TEST_CASE("a transaction posted to the wrong endpoint is refused") {
  Gate g;
  auto client = g.client();
  Account acc = test::account(9);
  Transaction tx = Transaction::make_signed(acc, 1, "did-registry", "revoke",
                                            DidRevokeArgs{"did:mdm:x"}.encode());
  CHECK_THROWS_WITH_AS(client.submit_tx("/did/register", tx), doctest::Contains("wrong-target"),
                       Error);
}

TEST_CASE("token verification endpoint treats hostile input as a query") {
  Gate g;
  auto client = g.client();
  json r1 = client.verify_token("complete garbage");
  CHECK(r1["accepted"] == false);
  CHECK(r1["failed_step"] == 1);
  json r2 = client.verify_token("");
  CHECK(r2["accepted"] == false);
  CHECK(r2.contains("height"));
}

TEST_CASE("upload requires a valid envelope") {
  Gate g;
  auto client = g.client();
  Account acc = test::account(9);
  json body;
  body["data"] = base64url_encode(to_bytes("blob"));
  body["kind"] = "multimedia-source";
  json env = make_envelope(acc, body);
  env["sig"] = std::string(128, '0'); // forged
  int status = 0;
  httplib::Client raw("127.0.0.1", g.port);
  auto res = raw.Post("/store/upload", env.dump(), "application/json");
  REQUIRE(res);
  status = res->status;
  CHECK(status == 401);

  // the honest envelope works
  CHECK(client.upload(acc, to_bytes("blob"), "multimedia-source")["content_hash"] ==
        to_hex(sha256(to_bytes("blob"))));
}

TEST_CASE("full access-granting sequence over endpoints only") {
  Gate g;
  auto client = g.client();
  Bytes content = to_bytes("the actual multimedia source file bytes");
  Trio t = run_flow_over_http(g, client, content);

  json grant = client.request_access(t.enduser, t.enduser_did, "track-1",
                                     {"publication", "broadcasting"}, 60'000);
  CHECK(grant["status"] == "ok");
  CHECK(grant["delivery"].get<std::string>().find("enduser.example/inbox") != std::string::npos);
  std::string token = grant["token"].get<std::string>();

  json report = client.verify_token(token);
  CHECK(report["accepted"] == true);
  REQUIRE(report["steps"].size() == 6);
  for (const auto& s : report["steps"]) CHECK(s["ok"] == true);

  Bytes delivered = client.redeem(token);
  CHECK(delivered == content);
  CHECK(sha256(delivered) == sha256(content));

  // the certificate is in the work's on-chain access log
  auto log = client.media_access_log("track-1");
  REQUIRE(log.has_value());
  REQUIRE((*log)["access_log"].size() == 1);
  CHECK((*log)["access_log"][0] == grant["cert_id"]);

  // and queryable in the certificate registry
  auto cert = client.chain_query("access-certificates", grant["cert_id"].get<std::string>());
  REQUIRE(cert.has_value());
  CHECK((*cert)["enduser_did"] == t.enduser_did);
}

TEST_CASE("grant policy bounds requested rights by the agreement") {
  Gate g;
  auto client = g.client();
  Trio t = run_flow_over_http(g, client, to_bytes("bytes"), "track-2");
  // the agreement granted broadcasting+publication only
  CHECK_THROWS_WITH_AS(
      client.request_access(t.enduser, t.enduser_did, "track-2", {"revision"}, 60'000),
      doctest::Contains("rights-not-granted"), Error);
  CHECK_THROWS_WITH_AS(client.request_access(t.enduser, t.enduser_did, "track-2",
                                             {"publication", "revision"}, 60'000),
                       doctest::Contains("rights-not-granted"), Error);
}

TEST_CASE("access requests need the end user's own signature and a granting key") {
  Gate g;
  auto client = g.client();
  Trio t = run_flow_over_http(g, client, to_bytes("bytes"), "track-3");

  // stranger signing for someone else's DID
  Account stranger = test::account(42);
  CHECK_THROWS_WITH_AS(
      client.request_access(stranger, t.enduser_did, "track-3", {"publication"}, 60'000),
      doctest::Contains("unknown-enduser"), Error);

  // unknown work
  CHECK_THROWS_WITH_AS(
      client.request_access(t.enduser, t.enduser_did, "no-such-media", {"publication"}, 60'000),
      doctest::Contains("not-approved"), Error);
}

TEST_CASE("request_access without the provider key in the gateway keystore") {
  Gate g;
  auto client = g.client();
  Trio t = run_flow_over_http(g, client, to_bytes("bytes"), "track-4");
  // wipe the provider key the flow installed
  fs::remove(fs::path(g.node.keystore().dir()) / "provider.key.json");
  CHECK_THROWS_WITH_AS(
      client.request_access(t.enduser, t.enduser_did, "track-4", {"publication"}, 60'000),
      doctest::Contains("no-provider-key"), Error);
}

TEST_CASE("deregistration over HTTP also cleans the off-chain blob") {
  Gate g;
  auto client = g.client();
  Bytes content = to_bytes("short-lived content");
  Trio t = run_flow_over_http(g, client, content, "track-5");
  Hash32 hash = sha256(content);
  CHECK(g.node.store().contains(hash));
  CHECK(client.media_deregister(t.owner, "track-5").ok());
  CHECK_FALSE(g.node.store().contains(hash));
  CHECK_FALSE(client.media_record("track-5").has_value());
}

TEST_CASE("chain introspection endpoints") {
  Gate g;
  auto client = g.client();
  Account acc = test::account(9);
  CHECK(client.next_nonce(acc.address) == 1);
  std::string did = did_for_address(acc.address);
  REQUIRE(client.did_register(acc, did, make_ddo(did, acc.public_key).canonical()).ok());
  CHECK(client.next_nonce(acc.address) == 2);

  json tip = client.chain_tip();
  CHECK(tip["height"].get<uint64_t>() >= 1);
  CHECK(tip["state_root"].get<std::string>().size() == 64);

  auto rec = client.chain_query("did-registry", did);
  REQUIRE(rec.has_value());
  CHECK((*rec)["did"] == did);
  std::string err;
  CHECK_FALSE(client.chain_query("did-registry", "did:mdm:absent", &err).has_value());
  CHECK(err == "not-found");
  CHECK_FALSE(client.chain_query("bogus", "x", &err).has_value());
  CHECK(err == "unknown-registry");
}
