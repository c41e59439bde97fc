#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acts/types.hpp"

namespace acts {

/// Black-box objective in the maximization convention. Inputs are unit-cube
/// points mapped affinely onto the native bounds.
struct Problem {
  std::string name;
  Eigen::Index d = 0;
  Vector lower;  // native bounds
  Vector upper;
  std::optional<double> optimum_value;
  std::optional<Vector> optimizer_unit;  // a known maximizer in unit coordinates
  double noise_sd = 0.0;
  std::function<double(const Vector&)> native;  // maximization value at a native point

  Vector to_native(const Eigen::Ref<const Vector>& u) const;
  Vector to_unit(const Eigen::Ref<const Vector>& x) const;
  /// Noise-free value at a unit-cube point.
  double value(const Eigen::Ref<const Vector>& u) const;
  /// Noise-free values for the rows of U.
  Vector values(const Matrix& u) const;
};

/// Ackley, Levy, Rosenbrock, Rastrigin, Hartmann6, Quadratic, Bimodal
/// (case-insensitive). Throws ConfigError for unknown names or invalid d.
Problem make_problem(const std::string& name, Eigen::Index d, double noise_sd = 0.0);
std::vector<std::string> problem_names();

/// value(u) + noise_sd * z with z drawn from `seed`. Throws for points
/// outside [0, 1]^d (slack 1e-12).
double evaluate(const Problem& p, const Eigen::Ref<const Vector>& u, std::uint64_t seed);

namespace functions {
// Native-scale definitions in their usual minimization form.
double ackley(const Vector& x);
double levy(const Vector& x);
double rosenbrock(const Vector& x);
double rastrigin(const Vector& x);
double hartmann6(const Vector& x);
}  // namespace functions

}  // namespace acts
