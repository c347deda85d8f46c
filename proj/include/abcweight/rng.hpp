#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace abcweight {

using RngEngine = std::mt19937_64;

// Stream purposes, mixed into derived seeds so that the draws consumed by one
// phase of a run never alias those of another.
enum class Stream : std::uint64_t {
  observed_data = 1,
  candidate = 2,
  prior_reference = 3,
  optimizer = 4,
  metric = 5,
  scan = 6,
  strategy = 7,
  repeat = 8,
  pilot = 9,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Counter-based seed derivation: hashing the root seed with a path of
// integers gives independent, scheduling-order-free streams.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::splitmix64(root);
  for (std::uint64_t p : path) {
    h = detail::splitmix64(h ^ detail::splitmix64(p));
  }
  return h;
}

inline RngEngine make_stream(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  return RngEngine(derive_seed(root, path));
}

inline RngEngine make_stream(std::uint64_t root, Stream purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
  return make_stream(root, {static_cast<std::uint64_t>(purpose), a, b});
}

}  // namespace abcweight
