#include "acts/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "acts/error.hpp"
#include "acts/rng.hpp"
#include "acts/sobol.hpp"

namespace acts {

namespace {

constexpr double kCollapseTol = 1e-12;

void check_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}

Matrix map_into(const Matrix& unit, const SearchRegion& region) {
  const Vector side = region.side_lengths();
  Matrix out = unit * side.asDiagonal();
  out.rowwise() += region.lower.transpose();
  // keep points inside the box despite rounding
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j).cwiseMax(region.lower[j]).cwiseMin(region.upper[j]);
  }
  return out;
}

/// Applies a Bernoulli mask row by row; `repair` picks the dimension forced
/// on when a row comes out empty.
template <class Repair>
Matrix apply_mask(const Matrix& base, const Eigen::Ref<const Vector>& x0, const Vector& probs, std::uint64_t seed,
                  Repair&& repair) {
  const Eigen::Index m = base.rows(), d = base.cols();
  Rng rng(derive_seed(seed, Stream::Mask));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool on = unit(rng) < probs[j];
      out(i, j) = on ? base(i, j) : x0[j];
      any = any || on;
    }
    if (!any) {
      const Eigen::Index j = repair(rng);
      out(i, j) = base(i, j);
    }
  }
  return out;
}

}  // namespace

SearchRegion SearchRegion::unit_cube(Eigen::Index d) {
  return box(Vector::Zero(d), Vector::Ones(d), RegionKind::Domain);
}

SearchRegion SearchRegion::box(Vector lower, Vector upper, RegionKind kind) {
  if (lower.size() != upper.size()) throw DimensionError("SearchRegion: bound sizes differ");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("SearchRegion: lower > upper");
  SearchRegion r;
  r.lower = std::move(lower);
  r.upper = std::move(upper);
  r.kind = kind;
  return r;
}

bool SearchRegion::contains(const Eigen::Ref<const Vector>& x, double tol) const {
  if (empty || x.size() != dim()) return false;
  if ((x.array() < lower.array() - tol).any() || (x.array() > upper.array() + tol).any()) return false;
  if (line) {
    const double dd = line->direction.squaredNorm();
    const double v = std::clamp((x - line->anchor).dot(line->direction) / dd, 0.0, line->v_max);
    const Vector nearest = line->anchor + v * line->direction;
    if ((x - nearest).lpNorm<Eigen::Infinity>() > std::max(tol, 1e-9)) return false;
  }
  return true;
}

CandidateSet sobol_candidates(const SearchRegion& region, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sobol_candidates: M must be >= 1");
  CandidateSet out;
  out.points = map_into(sobol_points(m, region.dim(), seed), region);
  out.region = region;
  out.policy = CandidatePolicy::Sobol;
  return out;
}

CandidateSet uniform_candidates(const SearchRegion& region, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("uniform_candidates: M must be >= 1");
  CandidateSet out;
  out.points = map_into(uniform_points(m, region.dim(), seed), region);
  out.region = region;
  out.policy = CandidatePolicy::Uniform;
  return out;
}

CandidateSet raasp(const Eigen::Ref<const Vector>& x0, Eigen::Index m, std::uint64_t seed,
                   const SearchRegion& region, double c) {
  const Eigen::Index d = region.dim();
  check_dim(x0.size(), d, "raasp");
  if (m < 1) throw std::invalid_argument("raasp: M must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("raasp: c must be positive");
  if (!region.contains(x0, 1e-12)) throw std::invalid_argument("raasp: x0 outside the region");
  const Vector probs = Vector::Constant(d, std::min(c / static_cast<double>(d), 1.0));
  const Matrix base = sobol_candidates(region, m, seed).points;
  std::uniform_int_distribution<Eigen::Index> pick(0, d - 1);
  CandidateSet out;
  out.points = apply_mask(base, x0, probs, seed, [&](Rng& rng) { return pick(rng); });
  out.region = region;
  out.policy = CandidatePolicy::Raasp;
  return out;
}

CandidateSet raasp(const Eigen::Ref<const Vector>& x0, Eigen::Index m, std::uint64_t seed) {
  return raasp(x0, m, seed, SearchRegion::unit_cube(x0.size()));
}

SearchRegion cone_region(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                         const SearchRegion& domain) {
  const Eigen::Index d = domain.dim();
  check_dim(x0.size(), d, "cone_region");
  check_dim(g.size(), d, "cone_region");
  if (!g.allFinite()) throw std::invalid_argument("cone_region: gradient is not finite");
  SearchRegion r;
  r.kind = RegionKind::Cone;
  r.lower.resize(d);
  r.upper.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double root = std::clamp(x0[j], domain.lower[j], domain.upper[j]);
    if (g[j] > 0.0) {
      r.lower[j] = root;
      r.upper[j] = domain.upper[j];
    } else if (g[j] < 0.0) {
      r.lower[j] = domain.lower[j];
      r.upper[j] = root;
    } else {
      r.lower[j] = r.upper[j] = root;
    }
  }
  return r;
}

Vector adaptive_mask_probs(const Eigen::Ref<const Vector>& g, const MaskVariant& variant) {
  const Eigen::Index d = g.size();
  if (!(variant.c > 0.0)) throw std::invalid_argument("adaptive_mask_probs: c must be positive");
  const Eigen::ArrayXd mag = g.array().abs();
  Vector p(d);
  auto lp = [&](double power) {
    const Eigen::ArrayXd w = mag.pow(power);
    const double total = w.sum();
    if (!(total > 0.0)) throw DegenerateGradientError("adaptive_mask_probs: gradient is all zero");
    return Vector((variant.c * w / total).min(1.0).matrix());
  };
  switch (variant.kind) {
    case MaskKind::L1:
      return lp(1.0);
    case MaskKind::L2:
      return lp(2.0);
    case MaskKind::L3:
      return lp(3.0);
    case MaskKind::TopK: {
      const auto k = std::min<Eigen::Index>(d, static_cast<Eigen::Index>(std::llround(variant.c)));
      std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mag[a] > mag[b]; });
      p.setZero();
      for (Eigen::Index i = 0; i < k; ++i) p[order[static_cast<std::size_t>(i)]] = 1.0;
      return p;
    }
    case MaskKind::Softmax: {
      if (!(mag > 0.0).any()) throw DegenerateGradientError("adaptive_mask_probs: gradient is all zero");
      const Eigen::ArrayXd e = (mag - mag.maxCoeff()).exp();
      return Vector((variant.c * e / e.sum()).min(1.0).matrix());
    }
  }
  throw std::invalid_argument("adaptive_mask_probs: unknown mask kind");
}

CandidateSet acts_raasp(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                        const SearchRegion& region, Eigen::Index m, const MaskVariant& variant,
                        std::uint64_t seed) {
  const Eigen::Index d = region.dim();
  check_dim(x0.size(), d, "acts_raasp");
  check_dim(g.size(), d, "acts_raasp");
  if (m < 1) throw std::invalid_argument("acts_raasp: M must be >= 1");
  CandidateSet out;
  out.region = region;
  out.policy = CandidatePolicy::AdaptiveRaasp;
  out.mask = variant;
  if (region.empty || (region.side_lengths().array() <= 0.0).all()) {
    spdlog::warn("acts_raasp: search region has no volume in any dimension; returning copies of x0");
    out.points = x0.transpose().replicate(m, 1);
    return out;
  }
  const Vector probs = adaptive_mask_probs(g, variant);
  Eigen::Index most_likely = 0;
  probs.maxCoeff(&most_likely);
  const Matrix base = sobol_candidates(region, m, seed).points;
  out.points = apply_mask(base, x0, probs, seed, [&](Rng&) { return most_likely; });
  return out;
}

SearchRegion line_region(const Eigen::Ref<const Vector>& x0, const Eigen::Ref<const Vector>& g,
                         const std::optional<std::vector<bool>>& mask, const SearchRegion& domain) {
  const Eigen::Index d = domain.dim();
  check_dim(x0.size(), d, "line_region");
  check_dim(g.size(), d, "line_region");
  Vector dir = g;
  if (mask) {
    if (static_cast<Eigen::Index>(mask->size()) != d) throw DimensionError("line_region: mask size mismatch");
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(*mask)[static_cast<std::size_t>(j)]) dir[j] = 0.0;
    }
  }
  // the segment only moves in dimensions where the box has room
  const Vector side = domain.side_lengths();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (side[j] <= 0.0) dir[j] = 0.0;
  }
  const double norm = dir.norm();
  if (!(norm > 0.0)) throw DegenerateGradientError("line_region: direction is zero after masking");

  double log_side = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (side[j] > 0.0) {
      log_side += std::log(side[j]);
      ++active;
    }
  }
  const double side_len = std::exp(log_side / static_cast<double>(active));
  const double half_hypotenuse = 0.5 * std::sqrt(static_cast<double>(d)) * side_len;
  double v_max = half_hypotenuse / norm;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (dir[j] > 0.0) v_max = std::min(v_max, (domain.upper[j] - x0[j]) / dir[j]);
    if (dir[j] < 0.0) v_max = std::min(v_max, (domain.lower[j] - x0[j]) / dir[j]);
  }
  v_max = std::max(v_max, 0.0);

  SearchRegion r;
  r.kind = RegionKind::Line;
  const Vector end = x0 + v_max * dir;
  r.lower = x0.cwiseMin(end);
  r.upper = x0.cwiseMax(end);
  r.line = LineSegment{x0, dir, v_max};
  return r;
}

Vector line_point(const SearchRegion& line, double v) {
  if (!line.line) throw std::invalid_argument("line_point: region is not a line");
  const LineSegment& s = *line.line;
  Vector x = s.anchor + std::clamp(v, 0.0, s.v_max) * s.direction;
  return x.cwiseMax(line.lower).cwiseMin(line.upper);
}

CandidateSet line_candidates(const SearchRegion& line, Eigen::Index m, std::uint64_t seed) {
  if (!line.line) throw std::invalid_argument("line_candidates: region is not a line");
  if (m < 1) throw std::invalid_argument("line_candidates: M must be >= 1");
  Rng rng(derive_seed(seed, Stream::Candidates, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CandidateSet out;
  out.points.resize(m, line.dim());
  for (Eigen::Index i = 0; i < m; ++i) out.points.row(i) = line_point(line, unit(rng) * line.line->v_max).transpose();
  out.region = line;
  out.policy = CandidatePolicy::Line;
  return out;
}

std::vector<bool> sample_mask(const Vector& probs, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::Mask, 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<bool> mask(static_cast<std::size_t>(probs.size()));
  bool any = false;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    mask[static_cast<std::size_t>(j)] = unit(rng) < probs[j];
    any = any || mask[static_cast<std::size_t>(j)];
  }
  if (!any && probs.size() > 0) {
    Eigen::Index j = 0;
    probs.maxCoeff(&j);
    mask[static_cast<std::size_t>(j)] = true;
  }
  return mask;
}

SearchRegion intersect(const SearchRegion& a, const SearchRegion& b, const std::optional<Vector>& anchor) {
  check_dim(a.dim(), b.dim(), "intersect");
  const Eigen::Index d = a.dim();
  SearchRegion r;
  r.kind = RegionKind::Intersection;
  r.lower = a.lower.cwiseMax(b.lower);
  r.upper = a.upper.cwiseMin(b.upper);
  r.empty = a.empty || b.empty;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r.lower[j] <= r.upper[j]) continue;
    if (r.lower[j] - r.upper[j] <= kCollapseTol) {
      const double target = anchor ? (*anchor)[j] : 0.5 * (r.lower[j] + r.upper[j]);
      r.lower[j] = r.upper[j] = std::clamp(target, r.upper[j], r.lower[j]);
    } else {
      r.empty = true;
    }
  }
  return r;
}

LogVolume log_volume(const SearchRegion& region) {
  LogVolume out;
  const Eigen::Index d = region.dim();
  if (region.empty) {
    out.value = -std::numeric_limits<double>::infinity();
    out.nondegenerate = out.value;
    out.degenerate_dims = d;
    return out;
  }
  if (region.line) {
    // a segment is a one-dimensional set
    const double len = region.line->v_max * region.line->direction.norm();
    out.nondegenerate = len > 0.0 ? std::log(len) : -std::numeric_limits<double>::infinity();
    out.degenerate_dims = len > 0.0 ? d - 1 : d;
    out.value = d == 1 ? out.nondegenerate : -std::numeric_limits<double>::infinity();
    return out;
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    const double side = region.upper[j] - region.lower[j];
    if (side > 0.0) {
      out.nondegenerate += std::log(side);
    } else {
      ++out.degenerate_dims;
    }
  }
  out.value = out.degenerate_dims > 0 ? -std::numeric_limits<double>::infinity() : out.nondegenerate;
  return out;
}

std::string to_string(CandidatePolicy p) {
  switch (p) {
    case CandidatePolicy::Sobol: return "sobol";
    case CandidatePolicy::Uniform: return "uniform";
    case CandidatePolicy::Raasp: return "raasp";
    case CandidatePolicy::AdaptiveRaasp: return "adaptive_raasp";
    case CandidatePolicy::Line: return "line";
  }
  return "unknown";
}

std::string to_string(MaskKind k) {
  switch (k) {
    case MaskKind::L1: return "l1";
    case MaskKind::L2: return "l2";
    case MaskKind::L3: return "l3";
    case MaskKind::TopK: return "topk";
    case MaskKind::Softmax: return "softmax";
  }
  return "unknown";
}

MaskKind mask_kind_from_string(const std::string& s) {
  std::string u;
  for (char ch : s) u.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (u == "l1") return MaskKind::L1;
  if (u == "l2") return MaskKind::L2;
  if (u == "l3") return MaskKind::L3;
  if (u == "topk" || u == "top-k" || u == "top_k") return MaskKind::TopK;
  if (u == "softmax") return MaskKind::Softmax;
  throw ConfigError("unknown mask variant '" + s + "' (expected L1, L2, L3, TopK, Softmax)");
}

}  // namespace acts
