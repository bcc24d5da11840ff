#include "mdm/keystore.hpp"

#include "mdm/did.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace mdm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string KeystoreEntry::to_text() const {
  json j;
  j["version"] = 1;
  j["name"] = name;
  j["did"] = did;
  j["address"] = to_hex(account.address);
  j["public_key"] = to_hex(account.public_key);
  j["secret_key"] = to_hex(account.secret_key.bytes.data(), account.secret_key.bytes.size());
  return j.dump(2) + "\n";
}

KeystoreEntry KeystoreEntry::from_text(const std::string& text) {
  json j = json::parse(text);
  if (j.value("version", 0) != 1) throw Error("keystore", "unsupported key file version");
  KeystoreEntry e;
  e.name = j.at("name").get<std::string>();
  e.did = j.at("did").get<std::string>();
  auto pk = from_hex_fixed<32>(j.at("public_key").get<std::string>());
  auto sk = from_hex_fixed<64>(j.at("secret_key").get<std::string>());
  if (!pk || !sk) throw Error("keystore", "bad key material");
  SecretKey secret;
  secret.bytes = *sk;
  e.account = Account::from_keys(*pk, secret);
  if (to_hex(e.account.address) != j.at("address").get<std::string>())
    throw Error("keystore", "address does not match public key");
  return e;
}

Keystore::Keystore(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string Keystore::path_for(const std::string& name) const {
  return (fs::path(dir_) / (name + ".key.json")).string();
}

KeystoreEntry Keystore::create(const std::string& name, const std::string& did) {
  KeystoreEntry e;
  e.name = name;
  e.account = Account::generate();
  e.did = did.empty() ? did_for_address(e.account.address) : did;
  save(e);
  return e;
}

std::optional<KeystoreEntry> Keystore::load(const std::string& name) const {
  std::ifstream in(path_for(name));
  if (!in) return std::nullopt;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return KeystoreEntry::from_text(text);
}

void Keystore::save(const KeystoreEntry& entry) const {
  std::ofstream out(path_for(entry.name));
  if (!out) throw Error("keystore", "cannot write " + path_for(entry.name));
  out << entry.to_text();
}

std::optional<KeystoreEntry> Keystore::find_by_address(const Address& addr) const {
  for (const auto& name : names()) {
    auto e = load(name);
    if (e && e->account.address == addr) return e;
  }
  return std::nullopt;
}

std::vector<std::string> Keystore::names() const {
  std::vector<std::string> out;
  constexpr std::string_view suffix = ".key.json";
  for (const auto& entry : fs::directory_iterator(dir_)) {
    std::string fname = entry.path().filename().string();
    if (fname.size() > suffix.size() &&
        fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(fname.substr(0, fname.size() - suffix.size()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace mdm
