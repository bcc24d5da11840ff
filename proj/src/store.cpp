#include "mdm/store.hpp"

#include "mdm/crypto.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>

namespace mdm {

namespace fs = std::filesystem;

BlobStore::BlobStore(std::string root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

std::string BlobStore::blob_path(const Hash32& content_hash) const {
  std::string hex = to_hex(content_hash);
  return (fs::path(root_) / hex.substr(0, 2) / hex.substr(2, 2) / hex).string();
}

Hash32 BlobStore::put(const Bytes& bytes, const std::string& kind) {
  if (bytes.empty()) throw Error("empty-blob");
  Hash32 hash = sha256(bytes);
  fs::path target = blob_path(hash);
  if (fs::exists(target)) return hash; // content-addressed: already stored

  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error("storage-full", ec.message());

  static std::atomic<uint64_t> counter{0};
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      fs::remove(tmp, ec);
      throw Error("storage-full", "write failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    if (!fs::exists(target)) throw Error("storage-full", "rename failed");
  }
  std::ofstream kf(target.string() + ".kind");
  kf << kind << "\n";
  return hash;
}

std::optional<Bytes> BlobStore::get(const Hash32& content_hash) const {
  std::ifstream in(blob_path(content_hash), std::ios::binary);
  if (!in) return std::nullopt;
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

bool BlobStore::contains(const Hash32& content_hash) const {
  return fs::exists(blob_path(content_hash));
}

std::optional<std::string> BlobStore::kind(const Hash32& content_hash) const {
  std::ifstream in(blob_path(content_hash) + ".kind");
  if (!in) return std::nullopt;
  std::string k;
  std::getline(in, k);
  return k;
}

void BlobStore::remove(const Hash32& content_hash) {
  fs::path p = blob_path(content_hash);
  std::error_code ec;
  if (!fs::remove(p, ec) || ec) throw Error("not-found", to_hex(content_hash));
  fs::remove(p.string() + ".kind", ec);
}

} // namespace mdm
