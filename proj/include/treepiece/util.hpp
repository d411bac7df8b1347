#ifndef TREEPIECE_UTIL_HPP
#define TREEPIECE_UTIL_HPP

#include <cstdint>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <string>
#include <thread>
#include <vector>

namespace treepiece {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of a base seed with stream coordinates.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// %.17g rendering; round-trips any finite double through strtod.
inline std::string format_double17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Runs fn(i) for i in [0, n) across threads; each index writes only its own
// output slot, so results are independent of scheduling. Callers reduce the
// slots sequentially by index afterwards.
inline void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn,
                                 unsigned num_threads = 0) {
  if (num_threads == 0) {
    num_threads = std::thread::hardware_concurrency();
    if (num_threads == 0) num_threads = 1;
  }
  if (num_threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (num_threads > n) num_threads = static_cast<unsigned>(n);
  std::vector<std::thread> workers;
  workers.reserve(num_threads);
  std::size_t chunk = (n + num_threads - 1) / num_threads;
  for (unsigned t = 0; t < num_threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace treepiece

#endif  // TREEPIECE_UTIL_HPP
