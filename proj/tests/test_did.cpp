#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mdm/did.hpp"

using namespace mdm;

TEST_CASE("DID grammar") {
  CHECK(is_valid_did("did:example:123456789abcdefghi"));
  CHECK(is_valid_did("did:mdm:00ff"));
  CHECK(is_valid_did("did:web:example.com:user:alice")); // idstring may hold colons
  CHECK_FALSE(is_valid_did("did::abc"));                 // empty method
  CHECK_FALSE(is_valid_did("did:method:"));              // empty idstring
  CHECK_FALSE(is_valid_did("did:methodonly"));
  CHECK_FALSE(is_valid_did("urn:uuid:1234"));
  CHECK_FALSE(is_valid_did(""));
}

TEST_CASE("platform DID derives from the account address") {
  Account acc = test::account(1);
  std::string did = did_for_address(acc.address);
  CHECK(did == "did:mdm:" + to_hex(acc.address));
  CHECK(is_valid_did(did));
}

TEST_CASE("standard document round-trips through its canonical text") {
  Account acc = test::account(2);
  std::string did = did_for_address(acc.address);
  DidDocument doc = make_ddo(did, acc.public_key, "https://repo.example/svc");
  std::string text = doc.canonical();

  auto parsed = DidDocument::parse(text);
  REQUIRE(parsed.has_value());
  CHECK(parsed->id == did);
  CHECK(parsed->context == "https://w3id.org/did/v1");
  REQUIRE(parsed->public_keys.size() == 1);
  CHECK(parsed->public_keys[0].id == did + "#keys-1");
  CHECK(parsed->public_keys[0].type == "Ed25519VerificationKey2018");
  REQUIRE(parsed->services.size() == 1);
  CHECK(parsed->services[0].endpoint == "https://repo.example/svc");

  CHECK(parsed->canonical() == text); // canonical form is a fixed point
  CHECK_FALSE(parsed->validate(did).has_value());
  CHECK(parsed->first_verification_key() == acc.public_key);
}

TEST_CASE("document with a foreign key scheme is stored but yields no verification key") {
  std::string did = "did:example:123456789abcdefghi";
  std::string text = R"({
    "@context": "https://w3id.org/did/v1",
    "id": "did:example:123456789abcdefghi",
    "publicKey": [{
      "id": "did:example:123456789abcdefghi#keys-1",
      "type": "RsaVerificationKey2018",
      "controller": "did:example:123456789abcdefghi",
      "publicKeyPem": "-----BEGIN PUBLIC KEY...END PUBLIC KEY-----"
    }],
    "service": [{
      "id": "did:example:123456789abcdefghi#vcr",
      "type": "CredentialRepositoryService",
      "serviceEndpoint": "https://repository.example.com/service/8377464"
    }]
  })";
  auto doc = DidDocument::parse(text);
  REQUIRE(doc.has_value());
  CHECK_FALSE(doc->validate(did).has_value());
  CHECK_FALSE(doc->first_verification_key().has_value());
  CHECK(doc->services[0].id == did + "#vcr");
}

TEST_CASE("validation rejects malformed documents") {
  Account acc = test::account(3);
  std::string did = did_for_address(acc.address);
  DidDocument doc = make_ddo(did, acc.public_key);

  SUBCASE("id mismatch") { CHECK(doc.validate("did:mdm:other").has_value()); }
  SUBCASE("no public key") {
    doc.public_keys.clear();
    CHECK(doc.validate(did).has_value());
  }
  SUBCASE("key id missing the DID prefix") {
    doc.public_keys[0].id = "did:mdm:someone-else#keys-1";
    CHECK(doc.validate(did).has_value());
  }
  SUBCASE("bare fragment") {
    doc.public_keys[0].id = did + "#";
    CHECK(doc.validate(did).has_value());
  }
  SUBCASE("service id foreign") {
    doc.services.push_back({"did:x:y#svc", "T", "https://x"});
    CHECK(doc.validate(did).has_value());
  }
}

TEST_CASE("parse failures") {
  CHECK_FALSE(DidDocument::parse("not json").has_value());
  CHECK_FALSE(DidDocument::parse("[]").has_value());
  CHECK_FALSE(DidDocument::parse(R"({"id":"did:a:b"})").has_value());
  // an empty key list parses but never validates
  auto keyless = DidDocument::parse(R"({"@context":"c","id":"did:a:b","publicKey":[]})");
  REQUIRE(keyless.has_value());
  CHECK(keyless->validate("did:a:b").has_value());
}
