#pragma once

#include <filesystem>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "krk/tablebase.hpp"

namespace krk {

struct CacheConfig {
  GenerateOptions generate;
  std::uint64_t memory_budget = 1ULL << 30;  // bytes of value arrays kept resident
  std::optional<std::filesystem::path> directory;  // load/save tables here when set
};

// Thread-safe map from board size to tablebase. Each size is generated at
// most once while resident; least-recently-used tables are dropped when
// the resident total exceeds the budget.
class TablebaseCache {
 public:
  explicit TablebaseCache(CacheConfig config = {});

  std::shared_ptr<const Tablebase> get(Dims dims);
  std::vector<Dims> resident() const;  // sorted
  const CacheConfig& config() const { return config_; }

 private:
  using Future = std::shared_future<std::shared_ptr<const Tablebase>>;

  std::shared_ptr<const Tablebase> produce(Dims dims) const;
  void touch(Dims dims);
  void evict_locked(Dims keep);

  CacheConfig config_;
  mutable std::mutex mu_;
  std::map<Dims, Future> entries_;
  std::list<Dims> lru_;  // front = most recent
};

// Cache directory from KRK_TB_DIR, if set and non-empty.
std::optional<std::filesystem::path> tablebase_dir_from_env();

}  // namespace krk
