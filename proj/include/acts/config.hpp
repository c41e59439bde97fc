#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "acts/harness.hpp"

namespace acts {

struct SampleQualitySettings {
  std::vector<std::string> problems{"Quadratic", "Ackley"};
  Eigen::Index dim = 60;
  int models = 10;
  int draws = 100;
  int snapshot_points = 200;
  Eigen::Index snapshot_M = 2000;
  std::vector<Method> policies{Method::Sobol, Method::Raasp, Method::ActsRaasp};
};

struct CurseSettings {
  std::vector<std::pair<std::string, Eigen::Index>> problems{
      {"Hartmann6", 6}, {"Ackley", 6}, {"Ackley", 20}, {"Ackley", 60}, {"Ackley", 100}};
  std::int64_t budget = 1000000;
  std::vector<CandidatePolicy> policies{CandidatePolicy::Sobol, CandidatePolicy::Uniform};
};

struct AblationSettings {
  std::vector<MaskKind> masks;
  /// Numbers or the expressions "d" and "d/10".
  std::vector<std::string> c_values;
  std::vector<Method> geometries;
};

/// Everything a CLI invocation needs; one JSON document per experiment.
struct ExperimentConfig {
  RunConfig run;
  int jobs = 1;
  SampleQualitySettings sample_quality;
  CurseSettings curse_of_dim;
  AblationSettings ablate;
  std::vector<int> checkpoints{50, 100, 200, 500, 750, 1000};
};

/// Parses a config document. Unknown keys and ill-typed values raise
/// ConfigError. A meta.json written by the CLI is accepted as well (its
/// "config" member is used).
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved config as pretty-printed JSON.
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Resolves a mask-coefficient expression ("20", "d", "d/10") for dimension d.
double resolve_c(const std::string& expr, Eigen::Index d);

}  // namespace acts
