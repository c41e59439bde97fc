#include "acts/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acts/error.hpp"

namespace acts {

int failure_tolerance(int q, Eigen::Index d) {
  if (q < 1 || d < 1) throw std::invalid_argument("failure_tolerance: q and d must be positive");
  // integer ceil division avoids rounding trouble in 4.0 / q
  const long long num = std::max<long long>(4, static_cast<long long>(d));
  return static_cast<int>((num + q - 1) / q);
}

TrustRegionState TrustRegionState::make(Eigen::Index d, int q, const TurboSettings& settings) {
  TrustRegionState s;
  s.settings = settings;
  s.length = settings.length_init;
  s.success_tol = settings.success_tol;
  s.failure_tol = failure_tolerance(q, d);
  return s;
}

TrustRegionState update(TrustRegionState s, bool improved) {
  s.restart_requested = false;
  if (improved) {
    ++s.success_count;
    s.failure_count = 0;
  } else {
    ++s.failure_count;
    s.success_count = 0;
  }
  if (s.success_count >= s.success_tol) {
    s.length = std::min(2.0 * s.length, s.settings.length_max);
    s.success_count = 0;
  } else if (s.failure_count >= s.failure_tol) {
    s.length /= 2.0;
    s.failure_count = 0;
  }
  if (s.length < s.settings.length_min) {
    s.length = s.settings.length_init;
    s.success_count = 0;
    s.failure_count = 0;
    ++s.restarts;
    s.restart_requested = true;
  }
  return s;
}

SearchRegion trust_region(const TrustRegionState& state, const Vector& lengthscales,
                          const Eigen::Ref<const Vector>& x0) {
  if (lengthscales.size() != x0.size()) throw DimensionError("trust_region: dimension mismatch");
  if ((lengthscales.array() <= 0.0).any()) throw std::invalid_argument("trust_region: lengthscales must be positive");
  const double log_geomean = lengthscales.array().log().mean();
  const Vector weights = (lengthscales.array().log() - log_geomean).exp().matrix();
  const Vector half = 0.5 * state.length * weights;
  Vector lower = (x0 - half).cwiseMax(0.0);
  Vector upper = (x0 + half).cwiseMin(1.0);
  return SearchRegion::box(std::move(lower), std::move(upper), RegionKind::TrustRegion);
}

}  // namespace acts
