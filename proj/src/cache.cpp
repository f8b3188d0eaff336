#include "krk/cache.hpp"

#include <algorithm>
#include <cstdlib>

namespace krk {

TablebaseCache::TablebaseCache(CacheConfig config) : config_(std::move(config)) {}

std::shared_ptr<const Tablebase> TablebaseCache::produce(Dims dims) const {
  std::optional<std::filesystem::path> file;
  if (config_.directory) {
    file = *config_.directory /
           ("krk_" + std::to_string(dims.m) + "x" + std::to_string(dims.n) + ".tb");
    std::error_code ec;
    if (std::filesystem::exists(*file, ec)) {
      try {
        auto tb = std::make_shared<const Tablebase>(load(*file));
        if (tb->dims() == dims) return tb;
      } catch (const Error&) {
        // unreadable cache file; regenerate and overwrite
      }
    }
  }
  auto tb = std::make_shared<const Tablebase>(generate(dims, config_.generate));
  if (file) {
    std::error_code ec;
    std::filesystem::create_directories(file->parent_path(), ec);
    try {
      save(*tb, *file);
    } catch (const Error&) {
      // read-only cache directory is not fatal
    }
  }
  return tb;
}

std::shared_ptr<const Tablebase> TablebaseCache::get(Dims dims) {
  validate_dims(dims);
  if (static_cast<std::uint64_t>(dims.squares()) > config_.generate.cap) {
    throw Error(ErrorCode::Resource,
                "board " + std::to_string(dims.m) + "x" + std::to_string(dims.n) +
                    " exceeds cap m*n <= " + std::to_string(config_.generate.cap) + "; needs " +
                    std::to_string(required_bytes(dims)) + " bytes");
  }

  Future fut;
  std::promise<std::shared_ptr<const Tablebase>> promise;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(dims);
    if (it == entries_.end()) {
      fut = promise.get_future().share();
      entries_.emplace(dims, fut);
      owner = true;
    } else {
      fut = it->second;
    }
    touch(dims);
  }

  if (owner) {
    try {
      promise.set_value(produce(dims));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mu_);
      entries_.erase(dims);
      lru_.remove(dims);
      return fut.get();  // rethrows
    }
    std::lock_guard lock(mu_);
    evict_locked(dims);
  }
  return fut.get();
}

void TablebaseCache::touch(Dims dims) {
  lru_.remove(dims);
  lru_.push_front(dims);
}

void TablebaseCache::evict_locked(Dims keep) {
  auto resident_bytes = [&] {
    std::uint64_t total = 0;
    for (const auto& [d, f] : entries_) total += required_bytes(d);
    return total;
  };
  while (resident_bytes() > config_.memory_budget) {
    auto victim = std::find_if(lru_.rbegin(), lru_.rend(), [&](Dims d) {
      if (d == keep) return false;
      auto it = entries_.find(d);
      return it != entries_.end() &&
             it->second.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
    });
    if (victim == lru_.rend()) break;
    entries_.erase(*victim);
    lru_.erase(std::next(victim).base());
  }
}

std::vector<Dims> TablebaseCache::resident() const {
  std::lock_guard lock(mu_);
  std::vector<Dims> out;
  for (const auto& [d, f] : entries_)
    if (f.wait_for(std::chrono::seconds(0)) == std::future_status::ready) out.push_back(d);
  return out;
}

std::optional<std::filesystem::path> tablebase_dir_from_env() {
  const char* dir = std::getenv("KRK_TB_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

}  // namespace krk
