#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acts/candidates.hpp"
#include "acts/gp.hpp"

namespace acts {

enum class Method { Sobol, Raasp, ActsSobol, ActsRaasp, ActsLine, ActsLineMasked };

bool is_adaptive(Method m) noexcept;
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct AcquisitionConfig {
  Eigen::Index M = 10000;
  Method method = Method::ActsRaasp;
  MaskVariant mask;
  /// Perturbation budget of plain RAASP, min(raasp_c / d, 1).
  double raasp_c = 20.0;
  bool use_turbo = false;
  int q = 1;
  std::uint64_t seed = 0;
  /// Per-member seeds; when empty they are derived from `seed`.
  std::vector<std::uint64_t> member_seeds;
  IncumbentRule incumbent = IncumbentRule::MaxObserved;
  SamplerOptions sampler;

  void validate() const;
  std::uint64_t member_seed(int i) const;
};

/// One Thompson-sampling draw and its maximizer.
struct MemberResult {
  Vector x;
  double ts_max = 0.0;
  Eigen::Index argmax = 0;
  SearchRegion region;
  LogVolume log_volume;
  std::optional<GradientSample> gradient;
  bool fell_back = false;  // cone ∩ trust region was empty
};

struct AcquisitionResult {
  Matrix x_next;  // q x d
  Vector ts_max;  // standardized scale
  Vector region_log_volumes;
  std::vector<Eigen::Index> degenerate_dims;
  std::vector<GradientSample> gradient_samples;  // empty for non-adaptive methods
  std::vector<SearchRegion> regions;
  Incumbent incumbent;
};

/// Candidate set for one member, plus the gradient draw it was built from
/// (adaptive methods only).
struct MemberCandidates {
  CandidateSet candidates;
  std::optional<GradientSample> gradient;
  bool fell_back = false;
};

MemberCandidates member_candidates(const GpModel& model, const AcquisitionConfig& cfg, const Vector& x0,
                                   const std::optional<SearchRegion>& trust_region, std::uint64_t member_seed);

/// Index of the largest entry; ties go to the lowest index.
Eigen::Index argmax_lowest(const Vector& v);

MemberResult acquire_member(const GpModel& model, const AcquisitionConfig& cfg, const Vector& x0,
                            const std::optional<SearchRegion>& trust_region, std::uint64_t member_seed);

/// q independent Thompson-sampling draws around the incumbent. The trust
/// region must be given exactly when cfg.use_turbo is set.
AcquisitionResult acquire(const GpModel& model, const AcquisitionConfig& cfg,
                          const std::optional<SearchRegion>& trust_region = std::nullopt);

}  // namespace acts
