#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "acts/types.hpp"

namespace acts {

/// Gray-code Sobol generator with Joe-Kuo direction numbers and an optional
/// seed-keyed digital shift (XOR of every coordinate with a random word).
class SobolEngine {
 public:
  static constexpr Eigen::Index kMaxDim = 1111;
  static constexpr int kBits = 32;

  /// Throws std::invalid_argument for d < 1 or d > kMaxDim.
  explicit SobolEngine(Eigen::Index d, std::optional<std::uint64_t> scramble_seed = std::nullopt);

  Eigen::Index dim() const noexcept { return dim_; }

  /// Points [first, first + count), one per row, in [0, 1).
  Matrix generate(std::uint64_t first, Eigen::Index count) const;

  /// Visits points [first, first + count) without materializing them.
  template <class Visitor>
  void for_each(std::uint64_t first, std::uint64_t count, Visitor&& visit) const {
    std::vector<std::uint32_t> state(static_cast<std::size_t>(dim_));
    std::vector<double> point(static_cast<std::size_t>(dim_));
    if (count == 0) return;
    init_state(first, state);
    for (std::uint64_t i = first;; ++i) {
      for (Eigen::Index j = 0; j < dim_; ++j) point[j] = to_unit(state[j] ^ shift_[j]);
      visit(i, static_cast<const double*>(point.data()));
      if (i + 1 == first + count) break;
      advance(i, state);
    }
  }

 private:
  void init_state(std::uint64_t index, std::vector<std::uint32_t>& state) const;
  void advance(std::uint64_t index, std::vector<std::uint32_t>& state) const;
  static double to_unit(std::uint32_t v) noexcept { return static_cast<double>(v) * 0x1p-32; }

  Eigen::Index dim_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> shift_;
};

/// First M points of a Sobol sequence in d dimensions. With `scramble` the
/// digital shift is keyed by `seed`. Dimensions beyond the direction table
/// fall back to uniform samples and print a warning to stderr.
Matrix sobol_points(Eigen::Index m, Eigen::Index d, std::uint64_t seed, bool scramble = true);

/// M iid uniform points in [0, 1)^d.
Matrix uniform_points(Eigen::Index m, Eigen::Index d, std::uint64_t seed);

}  // namespace acts
