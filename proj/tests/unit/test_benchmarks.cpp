#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "acts/benchmarks.hpp"
#include "acts/error.hpp"

using namespace acts;

TEST_CASE("known optima") {
  for (Eigen::Index d : {2, 10, 100}) {
    for (const char* name : {"Ackley", "Levy", "Rosenbrock", "Rastrigin", "Quadratic"}) {
      const Problem p = make_problem(name, d);
      REQUIRE(p.optimum_value.has_value());
      REQUIRE(p.optimizer_unit.has_value());
      CHECK(p.value(*p.optimizer_unit) == doctest::Approx(*p.optimum_value).epsilon(1e-12).scale(1.0));
    }
  }
  const Problem ackley = make_problem("ackley", 7);
  CHECK(ackley.native(Vector::Zero(7)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(*ackley.optimum_value == 0.0);
  const Problem quad = make_problem("Quadratic", 4);
  CHECK(quad.value(Vector::Constant(4, 0.5)) == 0.0);
  CHECK(quad.value(Vector::Zero(4)) == doctest::Approx(-1.0));
  CHECK(functions::rastrigin(Vector::Ones(2)) == doctest::Approx(2.0));
  CHECK(functions::rosenbrock(Vector::Zero(3)) == doctest::Approx(2.0));
}

TEST_CASE("Hartmann6 optimum survives local refinement") {
  const Problem h = make_problem("Hartmann6", 6);
  REQUIRE(h.optimizer_unit.has_value());
  Vector best = *h.optimizer_unit;
  double fbest = h.value(best);
  CHECK(fbest == doctest::Approx(3.32237).epsilon(1e-5));
  // compass search around the published location
  for (double step = 1e-2; step > 1e-8; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (Eigen::Index j = 0; j < 6; ++j) {
        for (double s : {-step, step}) {
          Vector x = best;
          x[j] = std::clamp(x[j] + s, 0.0, 1.0);
          const double f = h.value(x);
          if (f > fbest) {
            fbest = f;
            best = x;
            moved = true;
          }
        }
      }
    }
  }
  CHECK(fbest == doctest::Approx(3.32237).epsilon(1e-5));
  CHECK(*h.optimum_value == doctest::Approx(fbest).epsilon(1e-6));
  CHECK(fbest - h.value(*h.optimizer_unit) < 1e-5);
  CHECK_THROWS_AS(make_problem("Hartmann6", 5), ConfigError);
}

TEST_CASE("bimodal problem has its global peak in the narrow mode") {
  const Problem b = make_problem("Bimodal", 2);
  const Vector g = *b.optimizer_unit;
  CHECK(g[0] == 0.16);
  CHECK(g[1] == 0.2);
  Vector local(2);
  local << 0.72, 0.68;
  CHECK(b.value(local) < b.value(g));
  CHECK(b.value(local) > 0.99);
  // brute-force grid agrees with the reported optimum
  double grid_max = -1.0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      Vector x(2);
      x << i / 400.0, j / 400.0;
      grid_max = std::max(grid_max, b.value(x));
    }
  CHECK(grid_max <= *b.optimum_value + 1e-12);
  CHECK(grid_max > *b.optimum_value - 1e-3);
  CHECK_THROWS_AS(make_problem("Bimodal", 3), ConfigError);
}

TEST_CASE("unit cube mapping round-trips") {
  std::mt19937_64 rng(1);
  for (const std::string& name : problem_names()) {
    const Eigen::Index d = name == "Hartmann6" ? 6 : name == "Bimodal" ? 2 : 9;
    const Problem p = make_problem(name, d);
    for (int t = 0; t < 20; ++t) {
      const Vector u = testing::random_vector(d, rng);
      CHECK((p.to_unit(p.to_native(u)) - u).cwiseAbs().maxCoeff() < 1e-12);
      const Vector x = p.to_native(u);
      CHECK((x.array() >= p.lower.array()).all());
      CHECK((x.array() <= p.upper.array()).all());
    }
  }
  CHECK_THROWS_AS(make_problem("Branin", 2), ConfigError);
  CHECK_THROWS_AS(make_problem("Rosenbrock", 1), ConfigError);
}

TEST_CASE("noise injection") {
  const Problem clean = make_problem("Levy", 3);
  const Vector u = Vector::Constant(3, 0.3);
  CHECK(evaluate(clean, u, 1) == evaluate(clean, u, 2));
  CHECK(evaluate(clean, u, 1) == clean.value(u));

  const Problem noisy = make_problem("Levy", 3, 0.5);
  CHECK(evaluate(noisy, u, 7) == evaluate(noisy, u, 7));
  CHECK(evaluate(noisy, u, 7) != evaluate(noisy, u, 8));
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 10000; ++s) sum += evaluate(noisy, u, s);
  CHECK(std::abs(sum / 10000.0 - clean.value(u)) <= 4.0 * 0.5 / 100.0);

  CHECK_THROWS_AS(evaluate(clean, Vector::Constant(3, 1.1), 1), std::out_of_range);
  CHECK_THROWS_AS(evaluate(clean, Vector::Constant(2, 0.5), 1), DimensionError);
}
