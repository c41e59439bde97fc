#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "acts/acts.hpp"
#include "acts/error.hpp"
#include "acts/rng.hpp"
#include "acts/turbo.hpp"

using namespace acts;
using testing::random_model;

namespace {

AcquisitionConfig small_config(Method m, Eigen::Index M = 64, int q = 1, std::uint64_t seed = 1) {
  AcquisitionConfig cfg;
  cfg.method = m;
  cfg.M = M;
  cfg.q = q;
  cfg.seed = seed;
  return cfg;
}

constexpr Method kAll[] = {Method::Sobol,     Method::Raasp,   Method::ActsSobol,
                           Method::ActsRaasp, Method::ActsLine, Method::ActsLineMasked};

}  // namespace

TEST_CASE("a single candidate is always chosen") {
  std::mt19937_64 rng(1);
  const GpModel m = random_model(8, 3, rng);
  for (Method method : kAll) {
    const AcquisitionConfig cfg = small_config(method, 1);
    const Vector x0 = incumbent(m).x0;
    const MemberCandidates mc = member_candidates(m, cfg, x0, std::nullopt, cfg.member_seed(0));
    REQUIRE(mc.candidates.size() == 1);
    const AcquisitionResult r = acquire(m, cfg);
    CHECK(r.x_next.rows() == 1);
    CHECK(r.x_next.row(0) == mc.candidates.points.row(0));
  }
}

TEST_CASE("acquisition is reproducible and stays in the domain") {
  std::mt19937_64 rng(2);
  const GpModel m = random_model(10, 4, rng);
  for (Method method : kAll) {
    const AcquisitionConfig cfg = small_config(method, 128, 3, 77);
    const AcquisitionResult a = acquire(m, cfg), b = acquire(m, cfg);
    CHECK(a.x_next == b.x_next);
    CHECK(a.ts_max == b.ts_max);
    CHECK(a.x_next.minCoeff() >= 0.0);
    CHECK(a.x_next.maxCoeff() <= 1.0);
    CHECK(a.ts_max.size() == 3);
    CHECK(a.region_log_volumes.size() == 3);
    CHECK(a.gradient_samples.size() == (is_adaptive(method) ? 3u : 0u));
    CHECK(acquire(m, small_config(method, 128, 3, 78)).x_next != a.x_next);
  }
}

TEST_CASE("ts_max is the maximum of the member's draw") {
  std::mt19937_64 rng(3);
  const GpModel m = random_model(9, 2, rng);
  for (Method method : kAll) {
    const AcquisitionConfig cfg = small_config(method, 200);
    const std::uint64_t seed = cfg.member_seed(0);
    const Vector x0 = incumbent(m).x0;
    const MemberCandidates mc = member_candidates(m, cfg, x0, std::nullopt, seed);
    const MemberResult r = acquire_member(m, cfg, x0, std::nullopt, seed);
    CHECK(r.x == mc.candidates.points.row(r.argmax).transpose());
    const std::uint64_t vseed = derive_seed(seed, Stream::Values);
    const Vector f = mc.gradient ? sample_candidates_conditioned(m, *mc.gradient, mc.candidates.points, vseed)
                                 : sample_candidates(m, mc.candidates.points, vseed);
    CHECK(r.ts_max == f.maxCoeff());
    CHECK(r.argmax == argmax_lowest(f));
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  Vector v(5);
  v << 1.0, 3.0, 2.0, 3.0, -1.0;
  CHECK(argmax_lowest(v) == 1);
}

TEST_CASE("batch members with shared seeds coincide, independent seeds differ") {
  std::mt19937_64 rng(4);
  const GpModel m = random_model(12, 5, rng);
  AcquisitionConfig shared = small_config(Method::ActsRaasp, 64, 2, 5);
  shared.member_seeds = {11, 11};
  const AcquisitionResult same = acquire(m, shared);
  CHECK(same.x_next.row(0) == same.x_next.row(1));
  CHECK(same.gradient_samples[0].g == same.gradient_samples[1].g);

  // a weakly informed gradient, so the sign pattern of the draws varies
  Matrix x(2, 5);
  x << Matrix::Constant(1, 5, 0.5), Matrix::Constant(1, 5, 0.9);
  Vector y(2);
  y << 1.0, 0.0;
  const GpModel weak = condition(Dataset::make(x, y), KernelParams::isotropic(5, 0.8, 0.01));
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const AcquisitionResult r = acquire(weak, small_config(Method::ActsRaasp, 16, 2, s));
    if (r.regions[0].lower != r.regions[1].lower || r.regions[0].upper != r.regions[1].upper) ++differing;
    CHECK(r.gradient_samples[0].g != r.gradient_samples[1].g);
  }
  CHECK(differing > 0);
}

TEST_CASE("adaptive candidates lie in the sampled cone") {
  std::mt19937_64 rng(5);
  const GpModel m = random_model(10, 6, rng);
  const Vector x0 = incumbent(m).x0;
  for (Method method : {Method::ActsSobol, Method::ActsRaasp, Method::ActsLine, Method::ActsLineMasked}) {
    const MemberCandidates mc = member_candidates(m, small_config(method, 300), x0, std::nullopt, 9);
    REQUIRE(mc.gradient.has_value());
    const SearchRegion cone = cone_region(x0, mc.gradient->g, SearchRegion::unit_cube(6));
    for (Eigen::Index i = 0; i < mc.candidates.size(); ++i) CHECK(cone.contains(mc.candidates.points.row(i).transpose()));
  }
}

TEST_CASE("trust region bounds every choice") {
  std::mt19937_64 rng(6);
  const GpModel m = random_model(15, 3, rng);
  const Vector x0 = incumbent(m).x0;
  TrustRegionState st = TrustRegionState::make(3, 1);
  st.length = 0.1;
  const SearchRegion tr = trust_region(st, m.params.lengthscales, x0);
  for (Method method : kAll) {
    AcquisitionConfig cfg = small_config(method, 100, 4, 3);
    cfg.use_turbo = true;
    const AcquisitionResult r = acquire(m, cfg, tr);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(tr.contains(r.x_next.row(i).transpose()));
  }
  AcquisitionConfig cfg = small_config(Method::Sobol);
  CHECK_THROWS(acquire(m, cfg, tr));
  cfg.use_turbo = true;
  CHECK_THROWS(acquire(m, cfg));
}

TEST_CASE("growing the candidate set never lowers the sampled maximum") {
  std::mt19937_64 rng(7);
  const GpModel m = random_model(10, 3, rng);
  const Vector x0 = incumbent(m).x0;
  const GradientSample gs = sample_gradient(m, x0, 4);
  const Matrix base = testing::random_points(30, 3, rng);
  Matrix grown(45, 3);
  grown << base, testing::random_points(15, 3, rng);
  for (int s = 0; s < 10; ++s) {
    const Vector a = sample_candidates_conditioned(m, gs, base, static_cast<std::uint64_t>(s));
    const Vector b = sample_candidates_conditioned(m, gs, grown, static_cast<std::uint64_t>(s));
    CHECK((a - b.head(30)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(b.maxCoeff() >= a.maxCoeff() - 1e-8);
  }
}

TEST_CASE("configuration validation and method names") {
  AcquisitionConfig cfg;
  cfg.M = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.M = 5;
  cfg.q = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  for (Method method : kAll) CHECK(method_from_string(to_string(method)) == method);
  CHECK(method_from_string("acts_line_masked") == Method::ActsLineMasked);
  CHECK(method_from_string("acts") == Method::ActsRaasp);
  CHECK_THROWS_AS(method_from_string("cylinder"), ConfigError);
  CHECK(is_adaptive(Method::ActsSobol));
  CHECK_FALSE(is_adaptive(Method::Raasp));
  const GpModel empty = condition(Dataset::empty(2), KernelParams::isotropic(2, 0.5));
  CHECK_THROWS(acquire(empty, AcquisitionConfig{}));
}
