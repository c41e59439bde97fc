#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "acts/types.hpp"

namespace acts {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent seed streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a sequence of stream labels.
/// derive_seed(s, {a, b}) is a pure function, so the same labels always
/// reproduce the same stream regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t label : labels) h = splitmix64(h ^ splitmix64(label + 0x632be59bd9b4e019ULL));
  return h;
}

/// Stream labels, so call sites never collide by accident.
enum class Stream : std::uint64_t {
  WarmStart = 1,
  Noise,
  Fit,
  Acquisition,
  Gradient,
  Candidates,
  Values,
  Mask,
  Restart,
  Snapshot,
  Diagnostics,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream s, std::uint64_t index = 0) noexcept {
  return derive_seed(seed, {static_cast<std::uint64_t>(s), index});
}

inline Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

}  // namespace acts
