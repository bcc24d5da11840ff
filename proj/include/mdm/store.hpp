#pragma once

#include "mdm/common.hpp"

#include <optional>
#include <string>

namespace mdm {

// Content-addressed file store for raw multimedia, agreement documents and
// token copies. Blobs live under <root>/<ab>/<cd>/<full hex hash>, keyed by
// sha256 of their bytes; a `.kind` sidecar records the media kind label.
// Writes go through a temp file plus rename, so readers never observe a
// partial blob. Blobs are immutable; put is idempotent.
class BlobStore {
public:
  explicit BlobStore(std::string root);

  // Returns sha256(bytes). Throws Error("empty-blob") on empty input and
  // Error("storage-full") when the write fails.
  Hash32 put(const Bytes& bytes, const std::string& kind);

  std::optional<Bytes> get(const Hash32& content_hash) const;
  bool contains(const Hash32& content_hash) const;
  std::optional<std::string> kind(const Hash32& content_hash) const;

  // Throws Error("not-found") for unknown hashes.
  void remove(const Hash32& content_hash);

  const std::string& root() const { return root_; }
  std::string blob_path(const Hash32& content_hash) const;

private:
  std::string root_;
};

} // namespace mdm
