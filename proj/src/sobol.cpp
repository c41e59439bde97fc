#include "acts/sobol.hpp"

#include <bit>
#include <iostream>
#include <stdexcept>
#include <string>

#include "acts/rng.hpp"

namespace acts {

namespace {

struct DirectionRow {
  std::uint32_t poly;
  std::uint32_t m[18];
};

constexpr DirectionRow kDirectionTable[] = {
#include "acts/detail/sobol_directions.inc"
};

static_assert(std::size(kDirectionTable) == SobolEngine::kMaxDim);

std::array<std::uint32_t, SobolEngine::kBits> direction_numbers(const DirectionRow& row) {
  constexpr int bits = SobolEngine::kBits;
  std::array<std::uint64_t, bits + 1> m{};  // 1-based
  const int s = std::bit_width(row.poly) - 1;
  if (s == 0) {
    for (int k = 1; k <= bits; ++k) m[k] = 1;
  } else {
    for (int k = 1; k <= s && k <= bits; ++k) m[k] = row.m[k - 1];
    for (int k = s + 1; k <= bits; ++k) {
      std::uint64_t v = m[k - s] ^ (m[k - s] << s);
      for (int i = 1; i < s; ++i) {
        if ((row.poly >> (s - i)) & 1U) v ^= m[k - i] << i;
      }
      m[k] = v;
    }
  }
  std::array<std::uint32_t, bits> out{};
  for (int k = 1; k <= bits; ++k) out[k - 1] = static_cast<std::uint32_t>(m[k] << (bits - k));
  return out;
}

}  // namespace

SobolEngine::SobolEngine(Eigen::Index d, std::optional<std::uint64_t> scramble_seed) : dim_(d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("SobolEngine: dimension " + std::to_string(d) + " outside [1, " +
                                std::to_string(kMaxDim) + "]");
  }
  directions_.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) directions_.push_back(direction_numbers(kDirectionTable[j]));
  shift_.assign(static_cast<std::size_t>(d), 0U);
  if (scramble_seed) {
    Rng rng(*scramble_seed);
    std::uniform_int_distribution<std::uint32_t> word;
    for (auto& s : shift_) s = word(rng);
  }
}

void SobolEngine::init_state(std::uint64_t index, std::vector<std::uint32_t>& state) const {
  const std::uint64_t gray = index ^ (index >> 1);
  for (Eigen::Index j = 0; j < dim_; ++j) {
    std::uint32_t x = 0;
    for (int b = 0; b < kBits; ++b) {
      if ((gray >> b) & 1U) x ^= directions_[j][b];
    }
    state[j] = x;
  }
}

void SobolEngine::advance(std::uint64_t index, std::vector<std::uint32_t>& state) const {
  const int bit = std::countr_zero(index + 1);
  if (bit >= kBits) throw std::out_of_range("SobolEngine: sequence exhausted");
  for (Eigen::Index j = 0; j < dim_; ++j) state[j] ^= directions_[j][bit];
}

Matrix SobolEngine::generate(std::uint64_t first, Eigen::Index count) const {
  Matrix out(count, dim_);
  for_each(first, static_cast<std::uint64_t>(count), [&](std::uint64_t i, const double* p) {
    const auto row = static_cast<Eigen::Index>(i - first);
    for (Eigen::Index j = 0; j < dim_; ++j) out(row, j) = p[j];
  });
  return out;
}

Matrix sobol_points(Eigen::Index m, Eigen::Index d, std::uint64_t seed, bool scramble) {
  if (m < 0) throw std::invalid_argument("sobol_points: negative count");
  if (d > SobolEngine::kMaxDim) {
    std::cerr << "warning: sobol_points: d=" << d << " exceeds the direction table (" << SobolEngine::kMaxDim
              << "); using uniform samples\n";
    return uniform_points(m, d, seed);
  }
  const SobolEngine engine(d, scramble ? std::optional<std::uint64_t>(derive_seed(seed, Stream::Candidates))
                                       : std::nullopt);
  return engine.generate(0, m);
}

Matrix uniform_points(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::Candidates, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = unit(rng);
  }
  return out;
}

}  // namespace acts
