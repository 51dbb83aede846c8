#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace forestlab {

/// Splits [0, n) into fixed chunks (independent of the thread count), runs
/// fn(begin, end) for each chunk on up to `threads` workers and returns the
/// per-chunk results in chunk order, so an ordered merge is deterministic.
template <class Result, class Fn>
std::vector<Result> parallel_chunks(std::uint64_t n, unsigned threads, Fn fn,
                                    std::uint64_t chunk = 256) {
  const std::uint64_t chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<Result> results(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  auto work = [&](unsigned worker, unsigned workers) {
    for (std::uint64_t c = worker; c < chunks; c += workers) {
      try {
        results[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, chunks)));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace forestlab
