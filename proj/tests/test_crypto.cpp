#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "mdm/crypto.hpp"
#include "mdm/wire.hpp"

using namespace mdm;

TEST_CASE("sha256 matches the reference vectors") {
  // FIPS 180-2 test vectors
  CHECK(to_hex(sha256(std::string_view("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256(std::string_view(""))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("address is the first 20 bytes of the key hash") {
  Account acc = test::account(7);
  Hash32 h = sha256(std::span<const uint8_t>(acc.public_key.data(), acc.public_key.size()));
  CHECK(std::equal(acc.address.begin(), acc.address.end(), h.begin()));
  CHECK(to_hex(acc.address).size() == 40);
}

TEST_CASE("distinct keys get distinct addresses") {
  CHECK(test::account(1).address != test::account(2).address);
  // seeded generation is deterministic
  CHECK(test::account(9).public_key == test::account(9).public_key);
}

TEST_CASE("sign/verify round-trip and tamper rejection") {
  Account acc = test::account(4);
  Bytes msg = to_bytes("the message");
  Signature sig = sign(acc.secret_key, msg);
  CHECK(verify(acc.public_key, msg, sig));

  Bytes other = to_bytes("the messagE");
  CHECK_FALSE(verify(acc.public_key, other, sig));

  Signature bad = sig;
  bad[10] ^= 0x01;
  CHECK_FALSE(verify(acc.public_key, msg, bad));

  Account stranger = test::account(5);
  CHECK_FALSE(verify(stranger.public_key, msg, sig));
}

TEST_CASE("hex round-trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Bytes b = test::random_bytes(rng);
    auto back = from_hex(to_hex(b));
    REQUIRE(back.has_value());
    CHECK(*back == b);
  }
  CHECK_FALSE(from_hex("0g").has_value());
  CHECK_FALSE(from_hex("abc").has_value());
}

TEST_CASE("base64url round-trip, strictness") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    Bytes b = test::random_bytes(rng);
    auto back = base64url_decode(base64url_encode(b));
    REQUIRE(back.has_value());
    CHECK(*back == b);
  }
  CHECK(base64url_encode(to_bytes("any carnal pleasure")) == "YW55IGNhcm5hbCBwbGVhc3VyZQ");
  CHECK_FALSE(base64url_decode("a").has_value());       // length 1 mod 4
  CHECK_FALSE(base64url_decode("ab=").has_value());     // padding
  CHECK_FALSE(base64url_decode("a+").has_value());      // non-url alphabet
  // trailing-bit canonicality: "AB" and "AC" both cover one byte, only the
  // zero-padded form decodes
  CHECK(base64url_decode("AQ").has_value());
  CHECK_FALSE(base64url_decode("AR").has_value());
}

TEST_CASE("canonical encoder round-trips") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    Bytes b1 = test::random_bytes(rng);
    uint64_t n = rng();
    std::string s = "field-" + std::to_string(rng() % 1000);
    uint8_t byte = static_cast<uint8_t>(rng() & 0xff);

    wire::Encoder enc;
    enc.put_bytes(b1).put_u64(n).put_str(s).put_u8(byte);
    wire::Decoder dec(enc.bytes());
    CHECK(dec.get_bytes() == b1);
    CHECK(dec.get_u64() == n);
    CHECK(dec.get_str() == s);
    CHECK(dec.get_u8() == byte);
    CHECK(dec.done());
  }
}

TEST_CASE("decoder rejects truncation and trailing bytes") {
  wire::Encoder enc;
  enc.put_str("hello").put_u64(42);
  Bytes good = enc.bytes();

  Bytes truncated(good.begin(), good.end() - 3);
  wire::Decoder dec1(truncated);
  CHECK(dec1.get_str() == "hello");
  CHECK_THROWS_AS(dec1.get_u64(), Error);

  wire::Decoder dec2(good);
  dec2.get_str();
  CHECK_THROWS_AS(dec2.expect_done(), Error);
}

TEST_CASE("encoding is injective over field boundaries") {
  // ("ab","c") and ("a","bc") must not collide
  wire::Encoder e1, e2;
  e1.put_str("ab").put_str("c");
  e2.put_str("a").put_str("bc");
  CHECK(e1.bytes() != e2.bytes());
}
