#pragma once

#include "acts/candidates.hpp"
#include "acts/types.hpp"

namespace acts {

struct TurboSettings {
  double length_init = 0.8;
  double length_min = 0.0078125;  // 0.5^7
  double length_max = 1.6;
  int success_tol = 3;
};

/// ceil(max(4 / q, d / q)).
int failure_tolerance(int q, Eigen::Index d);

struct TrustRegionState {
  double length = 0.8;
  int success_count = 0;
  int failure_count = 0;
  int success_tol = 3;
  int failure_tol = 1;
  int restarts = 0;
  /// Set by the update that shrank the region below length_min; the caller
  /// discards its data and re-initializes. Cleared by the next update.
  bool restart_requested = false;
  TurboSettings settings;

  static TrustRegionState make(Eigen::Index d, int q, const TurboSettings& settings = {});
};

/// One step of the expand/shrink state machine.
TrustRegionState update(TrustRegionState state, bool improved);

/// Box centred at x0 with half-widths (length / 2) * ell_j / geomean(ell),
/// clipped to the unit cube.
SearchRegion trust_region(const TrustRegionState& state, const Vector& lengthscales,
                          const Eigen::Ref<const Vector>& x0);

}  // namespace acts
