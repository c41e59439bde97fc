#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "acts/acts.hpp"
#include "acts/benchmarks.hpp"
#include "acts/gp.hpp"
#include "acts/turbo.hpp"

namespace acts {

struct RunConfig {
  std::string problem = "Quadratic";
  Eigen::Index dim = 10;
  double noise_sd = 0.0;
  AcquisitionConfig acq;
  /// BO iterations; each one evaluates acq.q points. The evaluation budget
  /// is n_init + iterations * q, and re-initialization after a trust-region
  /// restart draws from it.
  int iterations = 100;
  int n_init = 30;
  int repeats = 10;
  std::uint64_t seed = 0;
  TurboSettings turbo;
  /// First fit after (re)initialization.
  FitOptions fit;
  /// Later fits, warm-started from the previous hyperparameters.
  FitOptions refit{.restarts = 1, .max_iters = 50, .warm_start = std::nullopt};
  bool warm_start_refit = true;
  /// Evaluation counts at which gradient diagnostics are computed (adaptive
  /// methods only).
  std::vector<int> diagnostic_checkpoints;
  int diagnostic_draws = 100;
  bool keep_final_model = false;

  void validate() const;
  int budget() const { return n_init + iterations * acq.q; }
};

struct TraceRecord {
  static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

  int t = 0;          // 1-based evaluation count
  int iteration = 0;  // 0 for initial design points
  int restart = 0;
  Vector x;  // unit-cube coordinates
  double y = 0.0;
  double best_so_far = 0.0;
  double log_volume = kNone;  // natural log; -inf when degenerate
  Eigen::Index degenerate_dims = 0;
  double grad_cov_trace = kNone;
  double tr_length = kNone;
  double ts_max = kNone;
};

struct GradientDiagnostic {
  int t = 0;
  double cov_trace = 0.0;
  double minority_fraction = 0.0;
};

struct RunTrace {
  std::string run_id;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  std::vector<GradientDiagnostic> diagnostics;
  std::optional<GpModel> final_model;
  bool completed = true;
  std::string error;

  double best() const;
  Matrix queries() const;
};

/// Seed of repeat r under base seed s. Shared by every method, so compared
/// methods see the same initial designs and noise.
std::uint64_t repeat_seed(std::uint64_t base, int repeat);

/// Sobol initial design -> (fit, acquire, evaluate, trust-region update)*.
/// A fit or sampling failure stops the run and returns the partial trace
/// with completed = false.
RunTrace run(const RunConfig& cfg, std::uint64_t seed, const std::string& run_id = "run");

/// cfg.repeats runs with seeds repeat_seed(cfg.seed, r), run_ids "r<r>".
/// `jobs` > 1 runs repeats concurrently; the result order is fixed.
std::vector<RunTrace> run_repeats(const RunConfig& cfg, int jobs = 1);

/// Trace of the gradient posterior covariance at x0 and the per-dimension
/// minority-sign fraction over `draws` gradient samples, averaged over
/// dimensions.
GradientDiagnostic gradient_uncertainty(const GpModel& model, const Eigen::Ref<const Vector>& x0, int draws,
                                        std::uint64_t seed);

/// Diagnostics of a trace at the requested checkpoints that it reached.
std::vector<GradientDiagnostic> metric_gradient_uncertainty(const RunTrace& trace);

struct Locality {
  double mean_step = 0.0;    // mean ||x_t - x_{t-1}||
  double greedy_tour = 0.0;  // nearest-neighbour open path from the first query
};

Locality metric_locality(const Matrix& queries);
Locality metric_locality(const RunTrace& trace);
double greedy_tour_length(const Matrix& points);

/// Fitted model state used by the sample-quality experiment.
struct ModelSnapshot {
  std::string problem;
  std::uint64_t seed = 0;
  GpModel model;
};

/// Runs plain RAASP-TS until the dataset holds `n_points` points and keeps
/// the fitted model.
ModelSnapshot make_snapshot(const std::string& problem, Eigen::Index d, int n_points, std::uint64_t seed,
                            Eigen::Index M = 2000);

struct SampleQualityRow {
  int model = 0;
  Method policy = Method::Sobol;
  int draw = 0;
  double ts_max = 0.0;     // standardized scale
  double objective = 0.0;  // true objective at the argmax
};

/// For every snapshot, policy and draw: fresh candidates plus one posterior
/// draw, recording the sample maximum and the objective there. Draw i under
/// snapshot j uses the same seed for every policy.
std::vector<SampleQualityRow> experiment_sample_quality(const std::vector<ModelSnapshot>& snapshots,
                                                        const std::vector<Method>& policies,
                                                        const AcquisitionConfig& base, int n_draws,
                                                        std::uint64_t seed);

/// 1, 2, 5, 10, 20, 50, ... up to and including max_budget.
std::vector<std::int64_t> budget_grid(std::int64_t max_budget);

struct CurseRow {
  std::string problem;
  Eigen::Index d = 0;
  CandidatePolicy policy = CandidatePolicy::Sobol;
  std::int64_t budget = 0;
  double best = 0.0;
  double gap = 0.0;  // optimum - best (NaN when the optimum is unknown)
};

/// Running maximum of the noise-free objective over the first N points of
/// the policy's stream, N on budget_grid(max_budget).
std::vector<CurseRow> experiment_curse_of_dim(const Problem& problem, const std::vector<CandidatePolicy>& policies,
                                              std::int64_t max_budget, std::uint64_t seed);

struct AblationSpec {
  RunConfig base;
  std::vector<MaskVariant> masks;          // empty -> base mask only
  std::vector<double> c_values;            // empty -> base mask c
  std::vector<Method> geometries;          // empty -> base method
};

struct AblationGroup {
  std::string label;
  RunConfig config;
  std::vector<RunTrace> traces;
};

/// Cross product of the ablation axes, each arm run with the same repeat seeds.
std::vector<AblationGroup> ablation_driver(const AblationSpec& spec, int jobs = 1);

}  // namespace acts
