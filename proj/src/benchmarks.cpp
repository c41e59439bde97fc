#include "acts/benchmarks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "acts/error.hpp"
#include "acts/rng.hpp"

namespace acts {

namespace functions {

using std::numbers::pi;

double ackley(const Vector& x) {
  const double n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2.0 * pi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

double levy(const Vector& x) {
  const Eigen::Index d = x.size();
  const Eigen::ArrayXd w = 1.0 + (x.array() - 1.0) / 4.0;
  const double s0 = std::sin(pi * w[0]);
  double total = s0 * s0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double s = std::sin(pi * w[i] + 1.0);
    total += (w[i] - 1.0) * (w[i] - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double sl = std::sin(2.0 * pi * w[d - 1]);
  total += (w[d - 1] - 1.0) * (w[d - 1] - 1.0) * (1.0 + sl * sl);
  return total;
}

double rosenbrock(const Vector& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    total += 100.0 * a * a + b * b;
  }
  return total;
}

double rastrigin(const Vector& x) {
  return 10.0 * static_cast<double>(x.size()) + (x.array().square() - 10.0 * (2.0 * pi * x.array()).cos()).sum();
}

double hartmann6(const Vector& x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) inner += a[i][j] * (x[j] - p[i][j]) * (x[j] - p[i][j]);
    total += alpha[i] * std::exp(-inner);
  }
  return -total;
}

}  // namespace functions

namespace {

std::string lower_case(const std::string& s) {
  std::string out;
  for (char ch : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return out;
}

Problem boxed(std::string name, Eigen::Index d, double lo, double hi) {
  Problem p;
  p.name = std::move(name);
  p.d = d;
  p.lower = Vector::Constant(d, lo);
  p.upper = Vector::Constant(d, hi);
  return p;
}

// Two Gaussian bumps on [0,1]^2: a wide local one and a narrow, taller one
// across the domain from it.
constexpr double kBimodalLocal[2] = {0.72, 0.68};
constexpr double kBimodalGlobal[2] = {0.16, 0.2};
constexpr double kBimodalLocalWidth = 0.22;
constexpr double kBimodalGlobalWidth = 0.05;
constexpr double kBimodalGlobalHeight = 1.6;

double bimodal(const Vector& x) {
  const double dl = std::pow(x[0] - kBimodalLocal[0], 2) + std::pow(x[1] - kBimodalLocal[1], 2);
  const double dg = std::pow(x[0] - kBimodalGlobal[0], 2) + std::pow(x[1] - kBimodalGlobal[1], 2);
  return std::exp(-0.5 * dl / (kBimodalLocalWidth * kBimodalLocalWidth)) +
         kBimodalGlobalHeight * std::exp(-0.5 * dg / (kBimodalGlobalWidth * kBimodalGlobalWidth));
}

}  // namespace

Vector Problem::to_native(const Eigen::Ref<const Vector>& u) const {
  return lower + (upper - lower).cwiseProduct(u);
}

Vector Problem::to_unit(const Eigen::Ref<const Vector>& x) const {
  return (x - lower).cwiseQuotient(upper - lower);
}

double Problem::value(const Eigen::Ref<const Vector>& u) const {
  if (u.size() != d) throw DimensionError(name + ": expected a " + std::to_string(d) + "-dimensional point");
  return native(to_native(u));
}

Vector Problem::values(const Matrix& u) const {
  Vector out(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) out[i] = value(u.row(i).transpose());
  return out;
}

std::vector<std::string> problem_names() {
  return {"Ackley", "Levy", "Rosenbrock", "Rastrigin", "Hartmann6", "Quadratic", "Bimodal"};
}

Problem make_problem(const std::string& name, Eigen::Index d, double noise_sd) {
  if (noise_sd < 0.0 || !std::isfinite(noise_sd)) throw ConfigError("noise_sd must be finite and >= 0");
  if (d < 1) throw ConfigError("problem dimension must be >= 1");
  const std::string key = lower_case(name);
  Problem p;
  if (key == "ackley") {
    p = boxed("Ackley", d, -32.768, 32.768);
    p.native = [](const Vector& x) { return -functions::ackley(x); };
    p.optimum_value = 0.0;
    p.optimizer_unit = Vector::Constant(d, 0.5);
  } else if (key == "levy") {
    p = boxed("Levy", d, -10.0, 10.0);
    p.native = [](const Vector& x) { return -functions::levy(x); };
    p.optimum_value = 0.0;
    p.optimizer_unit = Vector::Constant(d, 0.55);
  } else if (key == "rosenbrock") {
    if (d < 2) throw ConfigError("Rosenbrock requires d >= 2");
    p = boxed("Rosenbrock", d, -5.0, 10.0);
    p.native = [](const Vector& x) { return -functions::rosenbrock(x); };
    p.optimum_value = 0.0;
    p.optimizer_unit = Vector::Constant(d, 6.0 / 15.0);
  } else if (key == "rastrigin") {
    p = boxed("Rastrigin", d, -5.12, 5.12);
    p.native = [](const Vector& x) { return -functions::rastrigin(x); };
    p.optimum_value = 0.0;
    p.optimizer_unit = Vector::Constant(d, 0.5);
  } else if (key == "hartmann6") {
    if (d != 6) throw ConfigError("Hartmann6 requires d = 6");
    p = boxed("Hartmann6", d, 0.0, 1.0);
    p.native = [](const Vector& x) { return -functions::hartmann6(x); };
    p.optimum_value = 3.32237;
    Vector best(6);
    best << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
    p.optimizer_unit = best;
  } else if (key == "quadratic") {
    p = boxed("Quadratic", d, 0.0, 1.0);
    p.native = [](const Vector& x) { return -(x.array() - 0.5).square().sum(); };
    p.optimum_value = 0.0;
    p.optimizer_unit = Vector::Constant(d, 0.5);
  } else if (key == "bimodal") {
    if (d != 2) throw ConfigError("Bimodal requires d = 2");
    p = boxed("Bimodal", d, 0.0, 1.0);
    p.native = bimodal;
    Vector best(2);
    best << kBimodalGlobal[0], kBimodalGlobal[1];
    p.optimizer_unit = best;
    p.optimum_value = bimodal(best);
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  p.noise_sd = noise_sd;
  return p;
}

double evaluate(const Problem& p, const Eigen::Ref<const Vector>& u, std::uint64_t seed) {
  if (u.size() != p.d) throw DimensionError(p.name + ": dimension mismatch");
  if ((u.array() < -1e-12).any() || (u.array() > 1.0 + 1e-12).any() || !u.allFinite()) {
    throw std::out_of_range(p.name + ": point outside the unit cube");
  }
  const double f = p.value(u.cwiseMax(0.0).cwiseMin(1.0));
  if (p.noise_sd == 0.0) return f;
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  return f + p.noise_sd * z(rng);
}

}  // namespace acts
