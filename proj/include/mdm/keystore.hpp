#pragma once

#include "mdm/common.hpp"
#include "mdm/crypto.hpp"

#include <map>
#include <optional>
#include <string>

namespace mdm {

// One named identity on disk: keypair, derived address, DID. Secret material
// stays in these files; nothing here ever goes over the wire.
struct KeystoreEntry {
  std::string name;
  std::string did;
  Account account;

  std::string to_text() const; // versioned canonical JSON
  static KeystoreEntry from_text(const std::string& text);
};

class Keystore {
public:
  explicit Keystore(std::string dir);

  KeystoreEntry create(const std::string& name, const std::string& did = "");
  std::optional<KeystoreEntry> load(const std::string& name) const;
  void save(const KeystoreEntry& entry) const;

  // Entry whose account address matches, scanning all key files.
  std::optional<KeystoreEntry> find_by_address(const Address& addr) const;
  std::vector<std::string> names() const;

  const std::string& dir() const { return dir_; }

private:
  std::string path_for(const std::string& name) const;
  std::string dir_;
};

} // namespace mdm
