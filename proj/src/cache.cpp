#include "sac3/cache.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#ifdef SAC3_HAVE_OPENSSL
#include <openssl/evp.h>
#endif

namespace sac3 {

namespace fs = std::filesystem;

namespace {

std::string hex_encode(const unsigned char* data, std::size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out(len * 2, '0');
  for (std::size_t i = 0; i < len; ++i) {
    out[2 * i] = digits[data[i] >> 4];
    out[2 * i + 1] = digits[data[i] & 0xf];
  }
  return out;
}

std::string digest(const std::string& material) {
#ifdef SAC3_HAVE_OPENSSL
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int md_len = 0;
  if (EVP_Digest(material.data(), material.size(), md, &md_len, EVP_sha256(),
                 nullptr) == 1) {
    return hex_encode(md, md_len);
  }
#endif
  // Fallback: FNV-1a over the material, widened to 128 bits via two passes.
  std::uint64_t h1 = 1469598103934665603ull;
  std::uint64_t h2 = 14695981039346656037ull;
  for (unsigned char c : material) {
    h1 = (h1 ^ c) * 1099511628211ull;
    h2 = (h2 ^ (c + 1)) * 1099511628211ull;
  }
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64 "%016" PRIx64, h1, h2);
  return buf;
}

}  // namespace

DiskCache::DiskCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  load_existing();
}

std::string DiskCache::key_for(const CompletionRequest& request) {
  char temp_repr[64];
  std::snprintf(temp_repr, sizeof(temp_repr), "%.17g", request.temperature);
  std::string material;
  material.reserve(request.model.size() + request.prompt.size() + 48);
  material += request.model;
  material += '\x1f';
  material += request.prompt;
  material += '\x1f';
  material += temp_repr;
  material += '\x1f';
  material += std::to_string(request.sample_index);
  return digest(material);
}

void DiskCache::load_existing() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    if (!in) continue;
    try {
      nlohmann::json j;
      in >> j;
      entries_[entry.path().stem().string()] = j.value("response", "");
    } catch (const nlohmann::json::exception&) {
      // unreadable entry: ignored, will be treated as a miss and rewritten
    }
  }
}

std::optional<std::string> DiskCache::get(const CompletionRequest& request) {
  const std::string key = key_for(request);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void DiskCache::put(const CompletionRequest& request, const std::string& text) {
  const std::string key = key_for(request);
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  nlohmann::json j{
      {"model", request.model},
      {"prompt", request.prompt},
      {"temperature", request.temperature},
      {"sample_index", request.sample_index},
      {"response", text},
      {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
  };
  const fs::path final_path = dir_ / (key + ".json");
  const fs::path tmp_path = dir_ / (key + ".tmp");
  {
    std::ofstream out(tmp_path);
    if (!out) throw Error("cannot write cache entry: " + tmp_path.string());
    out << j.dump() << "\n";
  }
  fs::rename(tmp_path, final_path);
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = text;
}

CacheStats DiskCache::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return CacheStats{hits_, misses_, entries_.size()};
}

void DiskCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      fs::remove(entry.path());
    }
  }
}

std::string CachedBackend::complete(const CompletionRequest& request) {
  if (auto cached = cache_.get(request)) {
    return *cached;
  }
  std::string text = inner_->complete(request);
  cache_.put(request, text);
  return text;
}

}  // namespace sac3
