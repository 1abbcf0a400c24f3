#pragma once

#include <algorithm>
#include <cstdint>
#include <boost/random/mersenne_twister.hpp>
#include <thread>
#include <vector>

namespace wdq {

using Engine = boost::random::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for replication `index` under master seed `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + index * 0x9E3779B97F4A7C15ULL);
}

inline Engine make_engine(std::uint64_t base, std::uint64_t index) { return Engine(derive_seed(base, index)); }

// Runs f(i) for i in [0, count). Each index must write only its own slot, so the
// result never depends on the number of workers.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min<std::size_t>(hw, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace wdq
