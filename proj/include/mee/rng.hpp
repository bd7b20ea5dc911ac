#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace mee {

/// Seed contract: the same (seed, stream, count) reproduces a batch bit for bit.
struct RngSpec {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

using Engine = std::mt19937_64;

/// Engine for one fixed-size chunk of a batch. Chunks are the unit of
/// parallel work, so results never depend on the number of workers.
inline Engine make_engine(const RngSpec& rng, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                    static_cast<std::uint32_t>(rng.stream), static_cast<std::uint32_t>(rng.stream >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return Engine(seq);
}

/// Runs fn(chunk) for chunk in [first, last) on up to `workers` threads.
/// fn must only write to chunk-owned output.
template <class Fn>
void parallel_chunks(std::size_t first, std::size_t last, unsigned workers, Fn&& fn) {
  if (last <= first) return;
  const std::size_t total = last - first;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), total));
  if (threads == 1) {
    for (std::size_t c = first; c < last; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{first};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < last; c = next++) {
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mee
