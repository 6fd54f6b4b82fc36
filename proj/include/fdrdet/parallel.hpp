#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace fdrdet {

/// Splits [0, count) into contiguous blocks, one per worker. Every trial
/// must derive its randomness from its own index so the partition has no
/// effect on results.
inline void parallel_for(std::int64_t count, int workers,
                         const std::function<void(std::int64_t, std::int64_t, int)>& body) {
  if (workers <= 1 || count < 2) {
    body(0, count, 0);
    return;
  }
  const auto w = static_cast<std::int64_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (std::int64_t k = 0; k < w; ++k) {
    const std::int64_t begin = count * k / w;
    const std::int64_t end = count * (k + 1) / w;
    pool.emplace_back(body, begin, end, static_cast<int>(k));
  }
  for (auto& t : pool) t.join();
}

}  // namespace fdrdet
