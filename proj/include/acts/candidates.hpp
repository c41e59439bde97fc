#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acts/types.hpp"

namespace acts {

enum class RegionKind { Domain, TrustRegion, Cone, Intersection, Line };

/// Segment {anchor + v * direction : 0 <= v <= v_max}.
struct LineSegment {
  Vector anchor;
  Vector direction;
  double v_max = 0.0;
};

/// Axis-aligned box inside [0, 1]^d. Line regions also carry the segment;
/// their box is the segment's bounding box.
struct SearchRegion {
  Vector lower;
  Vector upper;
  RegionKind kind = RegionKind::Domain;
  bool empty = false;
  std::optional<LineSegment> line;

  static SearchRegion unit_cube(Eigen::Index d);
  static SearchRegion box(Vector lower, Vector upper, RegionKind kind);

  Eigen::Index dim() const noexcept { return lower.size(); }
  Vector side_lengths() const { return upper - lower; }
  /// Box membership with slack `tol`; for Line regions, also distance to the segment.
  bool contains(const Eigen::Ref<const Vector>& x, double tol = 1e-12) const;
};

enum class CandidatePolicy { Sobol, Uniform, Raasp, AdaptiveRaasp, Line };

enum class MaskKind { L1, L2, L3, TopK, Softmax };

/// Shape of the adaptive perturbation mask; `c` is the expected number of
/// perturbed dimensions.
struct MaskVariant {
  MaskKind kind = MaskKind::L2;
  double c = 20.0;
};

struct CandidateSet {
  Matrix points;  // M x d
  SearchRegion region;
  CandidatePolicy policy = CandidatePolicy::Sobol;
  std::optional<MaskVariant> mask;

  Eigen::Index size() const noexcept { return points.rows(); }
};

/// Sobol points mapped affinely into the region's box; degenerate
/// dimensions take the box's single value.
CandidateSet sobol_candidates(const SearchRegion& region, Eigen::Index m, std::uint64_t seed);
CandidateSet uniform_candidates(const SearchRegion& region, Eigen::Index m, std::uint64_t seed);

/// Random axis-aligned subspace perturbations of x0: base points are Sobol
/// over `region`, each coordinate is kept from the base with probability
/// min(c / d, 1) and otherwise equals x0. An all-zero mask gets one
/// uniformly chosen dimension.
CandidateSet raasp(const Eigen::Ref<const Vector>& x0, Eigen::Index m, std::uint64_t seed,
                   const SearchRegion& region, double c = 20.0);
CandidateSet raasp(const Eigen::Ref<const Vector>& x0, Eigen::Index m, std::uint64_t seed);

/// Axis-aligned cone rooted at x0 following the signs of g, clipped to `domain`.
SearchRegion cone_region(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                         const SearchRegion& domain);

/// Per-dimension perturbation probabilities. Throws DegenerateGradientError
/// for an all-zero g with the Lp and Softmax kinds.
Vector adaptive_mask_probs(const Eigen::Ref<const Vector>& g, const MaskVariant& variant);

/// RAASP inside `region` with gradient-weighted mask probabilities. An
/// all-zero mask perturbs the most probable dimension. If every dimension of
/// `region` is degenerate the result is M copies of x0.
CandidateSet acts_raasp(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                        const SearchRegion& region, Eigen::Index m, const MaskVariant& variant,
                        std::uint64_t seed);

/// Segment from x0 along g (optionally masked). Its Euclidean length is
/// half the hypotenuse of the active box, using the geometric mean of its
/// non-degenerate sides as the side length, cut where it leaves the box.
/// Throws DegenerateGradientError when the masked direction is zero.
SearchRegion line_region(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                         const std::optional<std::vector<bool>>& mask, const SearchRegion& domain);

/// Point at parameter v on a Line region.
Vector line_point(const SearchRegion& line, double v);

/// M points with v uniform on [0, v_max].
CandidateSet line_candidates(const SearchRegion& line, Eigen::Index m, std::uint64_t seed);

/// Draws one mask from per-dimension probabilities (used by line subspaces).
std::vector<bool> sample_mask(const Vector& probs, std::uint64_t seed);

/// Box intersection. Dimensions that cross by at most 1e-12 collapse onto
/// the point nearest `anchor` (or their midpoint); anything wider is
/// flagged as empty.
SearchRegion intersect(const SearchRegion& a, const SearchRegion& b,
                       const std::optional<Vector>& anchor = std::nullopt);

struct LogVolume {
  /// Natural log of the volume; -inf when any dimension is degenerate.
  double value = 0.0;
  /// Sum of log side lengths over the non-degenerate dimensions.
  double nondegenerate = 0.0;
  Eigen::Index degenerate_dims = 0;
};

LogVolume log_volume(const SearchRegion& region);

std::string to_string(CandidatePolicy p);
std::string to_string(MaskKind k);
MaskKind mask_kind_from_string(const std::string& s);

}  // namespace acts
