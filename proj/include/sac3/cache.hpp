#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "sac3/backend.hpp"

namespace sac3 {

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t entries = 0;
};

// On-disk key->value store: one JSON file per entry under the cache
// directory, mirrored in memory for lookups. Writes go through a temp file
// plus rename.
class DiskCache {
public:
  explicit DiskCache(std::filesystem::path dir);

  // Digest of (model, prompt, temperature, sample_index); any field change
  // changes the key.
  static std::string key_for(const CompletionRequest& request);

  std::optional<std::string> get(const CompletionRequest& request);
  void put(const CompletionRequest& request, const std::string& text);

  CacheStats stats() const;
  void clear();

  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;

  void load_existing();
};

// Write-through caching decorator over any backend.
class CachedBackend : public Backend {
public:
  CachedBackend(std::shared_ptr<Backend> inner, std::filesystem::path cache_dir)
      : inner_(std::move(inner)), cache_(std::move(cache_dir)) {}

  std::string complete(const CompletionRequest& request) override;
  std::uint64_t calls() const override { return inner_->calls(); }

  DiskCache& cache() { return cache_; }

private:
  std::shared_ptr<Backend> inner_;
  DiskCache cache_;
};

}  // namespace sac3
