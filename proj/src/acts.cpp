#include "acts/acts.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "acts/error.hpp"
#include "acts/rng.hpp"

namespace acts {

bool is_adaptive(Method m) noexcept {
  return m == Method::ActsSobol || m == Method::ActsRaasp || m == Method::ActsLine || m == Method::ActsLineMasked;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Sobol: return "sobol";
    case Method::Raasp: return "raasp";
    case Method::ActsSobol: return "acts-sobol";
    case Method::ActsRaasp: return "acts-raasp";
    case Method::ActsLine: return "acts-line";
    case Method::ActsLineMasked: return "acts-line-masked";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  std::string u;
  for (char ch : s) u.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  for (Method m : {Method::Sobol, Method::Raasp, Method::ActsSobol, Method::ActsRaasp, Method::ActsLine,
                   Method::ActsLineMasked}) {
    if (to_string(m) == u) return m;
  }
  if (u == "acts") return Method::ActsRaasp;
  throw ConfigError("unknown method '" + s +
                    "' (expected sobol, raasp, acts-sobol, acts-raasp, acts-line, acts-line-masked)");
}

void AcquisitionConfig::validate() const {
  if (M < 1) throw ConfigError("M must be >= 1");
  if (q < 1) throw ConfigError("q must be >= 1");
  if (!(mask.c > 0.0)) throw ConfigError("mask c must be positive");
  if (!(raasp_c > 0.0)) throw ConfigError("raasp c must be positive");
  if (!member_seeds.empty() && static_cast<int>(member_seeds.size()) != q) {
    throw ConfigError("member_seeds must have q entries");
  }
}

std::uint64_t AcquisitionConfig::member_seed(int i) const {
  if (!member_seeds.empty()) return member_seeds[static_cast<std::size_t>(i)];
  return derive_seed(seed, Stream::Acquisition, static_cast<std::uint64_t>(i));
}

Eigen::Index argmax_lowest(const Vector& v) {
  if (v.size() == 0) throw std::invalid_argument("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

MemberCandidates member_candidates(const GpModel& model, const AcquisitionConfig& cfg, const Vector& x0,
                                   const std::optional<SearchRegion>& trust_region, std::uint64_t member_seed) {
  const Eigen::Index d = model.dim();
  const SearchRegion domain = trust_region ? *trust_region : SearchRegion::unit_cube(d);
  const std::uint64_t cand_seed = derive_seed(member_seed, Stream::Candidates);
  MemberCandidates out;

  switch (cfg.method) {
    case Method::Sobol:
      out.candidates = sobol_candidates(domain, cfg.M, cand_seed);
      return out;
    case Method::Raasp:
      out.candidates = raasp(x0, cfg.M, cand_seed, domain, cfg.raasp_c);
      return out;
    default:
      break;
  }

  out.gradient = sample_gradient(model, x0, derive_seed(member_seed, Stream::Gradient));
  const Vector& g = out.gradient->g;

  if (cfg.method == Method::ActsLine || cfg.method == Method::ActsLineMasked) {
    std::optional<std::vector<bool>> mask;
    if (cfg.method == Method::ActsLineMasked) {
      mask = sample_mask(adaptive_mask_probs(g, cfg.mask), derive_seed(member_seed, Stream::Mask));
    }
    out.candidates = line_candidates(line_region(x0, g, mask, domain), cfg.M, cand_seed);
    return out;
  }

  SearchRegion region = cone_region(x0, g, SearchRegion::unit_cube(d));
  if (trust_region) {
    region = intersect(region, *trust_region, x0);
    if (region.empty) {
      spdlog::warn("cone and trust region do not intersect; using the trust region");
      region = *trust_region;
      out.fell_back = true;
    }
  }
  if (cfg.method == Method::ActsSobol) {
    out.candidates = sobol_candidates(region, cfg.M, cand_seed);
    out.candidates.policy = CandidatePolicy::Sobol;
  } else {
    out.candidates = acts_raasp(x0, g, region, cfg.M, cfg.mask, cand_seed);
  }
  return out;
}

MemberResult acquire_member(const GpModel& model, const AcquisitionConfig& cfg, const Vector& x0,
                            const std::optional<SearchRegion>& trust_region, std::uint64_t member_seed) {
  MemberCandidates mc = member_candidates(model, cfg, x0, trust_region, member_seed);
  const std::uint64_t value_seed = derive_seed(member_seed, Stream::Values);
  const Vector values = mc.gradient
                            ? sample_candidates_conditioned(model, *mc.gradient, mc.candidates.points, value_seed,
                                                            cfg.sampler)
                            : sample_candidates(model, mc.candidates.points, value_seed, cfg.sampler);
  MemberResult r;
  r.argmax = argmax_lowest(values);
  r.ts_max = values[r.argmax];
  r.x = mc.candidates.points.row(r.argmax).transpose();
  r.region = std::move(mc.candidates.region);
  r.log_volume = log_volume(r.region);
  r.gradient = std::move(mc.gradient);
  r.fell_back = mc.fell_back;
  return r;
}

AcquisitionResult acquire(const GpModel& model, const AcquisitionConfig& cfg,
                          const std::optional<SearchRegion>& trust_region) {
  cfg.validate();
  if (cfg.use_turbo != trust_region.has_value()) {
    throw ConfigError("acquire: a trust region is required exactly when use_turbo is set");
  }
  if (model.size() == 0) throw std::invalid_argument("acquire: model has no data");
  const Eigen::Index d = model.dim();

  AcquisitionResult out;
  out.incumbent = incumbent(model, cfg.incumbent);
  out.x_next.resize(cfg.q, d);
  out.ts_max.resize(cfg.q);
  out.region_log_volumes.resize(cfg.q);
  for (int i = 0; i < cfg.q; ++i) {
    MemberResult m = acquire_member(model, cfg, out.incumbent.x0, trust_region, cfg.member_seed(i));
    out.x_next.row(i) = m.x.transpose();
    out.ts_max[i] = m.ts_max;
    out.region_log_volumes[i] = m.log_volume.value;
    out.degenerate_dims.push_back(m.log_volume.degenerate_dims);
    if (m.gradient) out.gradient_samples.push_back(std::move(*m.gradient));
    out.regions.push_back(std::move(m.region));
  }
  return out;
}

}  // namespace acts
