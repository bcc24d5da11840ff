#include "mdm/did.hpp"

#include <json.hpp>

namespace mdm {

using nlohmann::json;

bool is_valid_did(const std::string& did) {
  if (did.rfind("did:", 0) != 0) return false;
  size_t method_end = did.find(':', 4);
  if (method_end == std::string::npos) return false;
  if (method_end == 4) return false;              // empty method
  return method_end + 1 < did.size();             // nonempty idstring
}

std::string did_for_address(const Address& addr) { return "did:mdm:" + to_hex(addr); }

std::string DidDocument::canonical() const {
  json keys = json::array();
  for (const auto& k : public_keys) {
    json jk;
    jk["id"] = k.id;
    jk["type"] = k.type;
    jk["controller"] = k.controller;
    if (k.type.find("Ed25519") != std::string::npos)
      jk["publicKeyHex"] = k.material;
    else
      jk["publicKeyPem"] = k.material;
    keys.push_back(jk);
  }
  json svcs = json::array();
  for (const auto& s : services) {
    json js;
    js["id"] = s.id;
    js["type"] = s.type;
    js["serviceEndpoint"] = s.endpoint;
    svcs.push_back(js);
  }
  json doc;
  doc["@context"] = context;
  doc["id"] = id;
  doc["publicKey"] = keys;
  doc["service"] = svcs;
  return doc.dump(); // nlohmann objects are key-sorted
}

std::optional<DidDocument> DidDocument::parse(const std::string& text, std::string* err) {
  auto fail = [&](const std::string& why) -> std::optional<DidDocument> {
    if (err) *err = why;
    return std::nullopt;
  };
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return fail("not a JSON object");

  DidDocument out;
  if (!doc.contains("@context") || !doc["@context"].is_string()) return fail("missing @context");
  out.context = doc["@context"].get<std::string>();
  if (!doc.contains("id") || !doc["id"].is_string()) return fail("missing id");
  out.id = doc["id"].get<std::string>();

  if (!doc.contains("publicKey") || !doc["publicKey"].is_array())
    return fail("missing publicKey list");
  for (const auto& jk : doc["publicKey"]) {
    if (!jk.is_object()) return fail("publicKey entry not an object");
    DidPublicKey k;
    if (!jk.contains("id") || !jk["id"].is_string()) return fail("publicKey entry missing id");
    k.id = jk["id"].get<std::string>();
    if (!jk.contains("type") || !jk["type"].is_string())
      return fail("publicKey entry missing type");
    k.type = jk["type"].get<std::string>();
    if (jk.contains("controller") && jk["controller"].is_string())
      k.controller = jk["controller"].get<std::string>();
    // key material field name varies by scheme; take the first one present
    for (const char* field : {"publicKeyHex", "publicKeyPem", "publicKeyBase58"}) {
      if (jk.contains(field) && jk[field].is_string()) {
        k.material = jk[field].get<std::string>();
        break;
      }
    }
    if (k.material.empty()) return fail("publicKey entry missing key material");
    out.public_keys.push_back(std::move(k));
  }

  if (doc.contains("service")) {
    if (!doc["service"].is_array()) return fail("service is not a list");
    for (const auto& js : doc["service"]) {
      if (!js.is_object()) return fail("service entry not an object");
      DidServiceEndpoint s;
      if (!js.contains("id") || !js["id"].is_string()) return fail("service entry missing id");
      s.id = js["id"].get<std::string>();
      if (js.contains("type") && js["type"].is_string()) s.type = js["type"].get<std::string>();
      if (js.contains("serviceEndpoint") && js["serviceEndpoint"].is_string())
        s.endpoint = js["serviceEndpoint"].get<std::string>();
      out.services.push_back(std::move(s));
    }
  }
  return out;
}

std::optional<std::string> DidDocument::validate(const std::string& did) const {
  if (!is_valid_did(did)) return "invalid DID syntax";
  if (id != did) return "document id does not match DID";
  if (context.empty()) return "empty @context";
  if (public_keys.empty()) return "no public key";
  const std::string prefix = did + "#";
  for (const auto& k : public_keys)
    if (k.id.rfind(prefix, 0) != 0 || k.id.size() == prefix.size())
      return "public key id is not the DID plus a fragment";
  for (const auto& s : services)
    if (s.id.rfind(prefix, 0) != 0 || s.id.size() == prefix.size())
      return "service id is not the DID plus a fragment";
  return std::nullopt;
}

std::optional<PublicKey> DidDocument::first_verification_key() const {
  for (const auto& k : public_keys) {
    if (k.type.find("Ed25519") == std::string::npos) continue;
    auto pk = from_hex_fixed<32>(k.material);
    if (pk) return pk;
  }
  return std::nullopt;
}

DidDocument make_ddo(const std::string& did, const PublicKey& pk,
                     const std::string& service_endpoint) {
  DidDocument doc;
  doc.context = "https://w3id.org/did/v1";
  doc.id = did;
  doc.public_keys.push_back(
      {did + "#keys-1", "Ed25519VerificationKey2018", did, to_hex(pk)});
  if (!service_endpoint.empty())
    doc.services.push_back({did + "#contact", "MessagingService", service_endpoint});
  return doc;
}

} // namespace mdm
