#include "acts/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "acts/error.hpp"
#include "acts/rng.hpp"
#include "acts/sobol.hpp"

namespace acts {

void RunConfig::validate() const {
  acq.validate();
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (diagnostic_draws < 2) throw ConfigError("diagnostic_draws must be >= 2");
  make_problem(problem, dim, noise_sd);
}

double RunTrace::best() const {
  return records.empty() ? -std::numeric_limits<double>::infinity() : records.back().best_so_far;
}

Matrix RunTrace::queries() const {
  if (records.empty()) return Matrix(0, 0);
  Matrix q(static_cast<Eigen::Index>(records.size()), records.front().x.size());
  for (std::size_t i = 0; i < records.size(); ++i) q.row(static_cast<Eigen::Index>(i)) = records[i].x.transpose();
  return q;
}

std::uint64_t repeat_seed(std::uint64_t base, int repeat) {
  return derive_seed(base, {0x7265706561ULL, static_cast<std::uint64_t>(repeat)});
}

GradientDiagnostic gradient_uncertainty(const GpModel& model, const Eigen::Ref<const Vector>& x0, int draws,
                                        std::uint64_t seed) {
  const GradientSample gp = gradient_posterior(model, x0);
  const Eigen::Index d = model.dim();
  Rng rng(derive_seed(seed, Stream::Diagnostics));
  Eigen::VectorXi positive = Eigen::VectorXi::Zero(d);
  for (int i = 0; i < draws; ++i) {
    const Vector g = gp.mean_g + gp.chol_g.triangularView<Eigen::Lower>() * standard_normal(d, rng);
    for (Eigen::Index j = 0; j < d; ++j) positive[j] += g[j] > 0.0 ? 1 : 0;
  }
  double minority = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double p = static_cast<double>(positive[j]) / draws;
    minority += std::min(p, 1.0 - p);
  }
  GradientDiagnostic out;
  out.cov_trace = gp.cov_g.trace();
  out.minority_fraction = minority / static_cast<double>(d);
  return out;
}

std::vector<GradientDiagnostic> metric_gradient_uncertainty(const RunTrace& trace) { return trace.diagnostics; }

namespace {

struct LoopState {
  Matrix X;
  Vector y;
  double restart_best = -std::numeric_limits<double>::infinity();
  std::optional<KernelParams> last_params;
  bool fresh = true;  // no fit since the last (re)initialization
};

void push_point(LoopState& s, const Vector& x, double y) {
  const Eigen::Index n = s.X.rows();
  s.X.conservativeResize(n + 1, x.size());
  s.X.row(n) = x.transpose();
  s.y.conservativeResize(n + 1);
  s.y[n] = y;
  s.restart_best = std::max(s.restart_best, y);
}

}  // namespace

RunTrace run(const RunConfig& cfg, std::uint64_t seed, const std::string& run_id) {
  cfg.validate();
  const Problem problem = make_problem(cfg.problem, cfg.dim, cfg.noise_sd);
  const Eigen::Index d = cfg.dim;
  const int budget = cfg.budget();

  RunTrace trace;
  trace.run_id = run_id;
  trace.seed = seed;
  trace.records.reserve(static_cast<std::size_t>(budget));

  double global_best = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int restart = 0;
  LoopState state;
  state.X.resize(0, d);
  std::vector<bool> checkpoint_done(cfg.diagnostic_checkpoints.size(), false);

  auto record = [&](const Vector& x, int iteration) -> TraceRecord& {
    const double y = evaluate(problem, x, derive_seed(seed, Stream::Noise, static_cast<std::uint64_t>(evaluations)));
    ++evaluations;
    push_point(state, x, y);
    global_best = std::max(global_best, y);
    TraceRecord r;
    r.t = evaluations;
    r.iteration = iteration;
    r.restart = restart;
    r.x = x;
    r.y = y;
    r.best_so_far = global_best;
    trace.records.push_back(std::move(r));
    return trace.records.back();
  };

  auto initialize = [&]() {
    state = LoopState{};
    state.X.resize(0, d);
    const int count = std::min(cfg.n_init, budget - evaluations);
    const Matrix init = sobol_points(count, d, derive_seed(seed, Stream::WarmStart, static_cast<std::uint64_t>(restart)));
    for (Eigen::Index i = 0; i < init.rows(); ++i) record(init.row(i).transpose(), 0);
  };

  auto diagnose = [&](const GpModel& model, const Vector& x0) {
    if (!is_adaptive(cfg.acq.method)) return;
    for (std::size_t c = 0; c < cfg.diagnostic_checkpoints.size(); ++c) {
      if (checkpoint_done[c] || evaluations < cfg.diagnostic_checkpoints[c]) continue;
      checkpoint_done[c] = true;
      GradientDiagnostic gd = gradient_uncertainty(
          model, x0, cfg.diagnostic_draws, derive_seed(seed, Stream::Diagnostics, static_cast<std::uint64_t>(c)));
      gd.t = cfg.diagnostic_checkpoints[c];
      trace.diagnostics.push_back(gd);
    }
  };
  auto pending_checkpoint = [&]() {
    if (!is_adaptive(cfg.acq.method)) return false;
    for (std::size_t c = 0; c < cfg.diagnostic_checkpoints.size(); ++c) {
      if (!checkpoint_done[c] && evaluations >= cfg.diagnostic_checkpoints[c]) return true;
    }
    return false;
  };

  initialize();
  TrustRegionState tr = TrustRegionState::make(d, cfg.acq.q, cfg.turbo);
  int iteration = 0;

  try {
    while (evaluations < budget) {
      ++iteration;
      FitOptions fo = state.fresh ? cfg.fit : cfg.refit;
      if (!state.fresh && cfg.warm_start_refit) fo.warm_start = state.last_params;
      if (!state.fresh && !cfg.warm_start_refit) fo = cfg.fit;
      const GpModel model =
          fit(Dataset::make(state.X, state.y), derive_seed(seed, Stream::Fit, static_cast<std::uint64_t>(iteration)), fo);
      state.last_params = model.params;
      state.fresh = false;

      const Incumbent inc = incumbent(model, cfg.acq.incumbent);
      diagnose(model, inc.x0);

      AcquisitionConfig acq = cfg.acq;
      acq.q = std::min(cfg.acq.q, budget - evaluations);
      acq.seed = derive_seed(seed, Stream::Acquisition, static_cast<std::uint64_t>(iteration));
      acq.member_seeds.clear();
      std::optional<SearchRegion> region;
      if (acq.use_turbo) region = trust_region(tr, model.params.lengthscales, inc.x0);
      const AcquisitionResult ar = acquire(model, acq, region);

      const double before = state.restart_best;
      bool improved = false;
      for (int i = 0; i < acq.q; ++i) {
        TraceRecord& r = record(ar.x_next.row(i).transpose(), iteration);
        r.log_volume = ar.region_log_volumes[i];
        r.degenerate_dims = ar.degenerate_dims[static_cast<std::size_t>(i)];
        r.ts_max = ar.ts_max[i];
        if (!ar.gradient_samples.empty()) r.grad_cov_trace = ar.gradient_samples[static_cast<std::size_t>(i)].cov_g.trace();
        if (acq.use_turbo) r.tr_length = tr.length;
        improved = improved || r.y > before;
      }

      if (acq.use_turbo) {
        tr = update(tr, improved);
        if (tr.restart_requested && evaluations < budget) {
          ++restart;
          initialize();
        }
      }
    }
    // checkpoints reached by the last batch
    if (pending_checkpoint()) {
      FitOptions fo = cfg.refit;
      fo.warm_start = state.last_params;
      const GpModel model = fit(Dataset::make(state.X, state.y), derive_seed(seed, Stream::Fit, 0), fo);
      diagnose(model, incumbent(model, cfg.acq.incumbent).x0);
    }
  } catch (const std::exception& e) {
    trace.completed = false;
    trace.error = e.what();
    spdlog::error("{}: stopped after {} evaluations: {}", run_id, evaluations, e.what());
    return trace;
  }

  if (cfg.keep_final_model) {
    trace.final_model = fit(Dataset::make(state.X, state.y), derive_seed(seed, Stream::Snapshot),
                            state.last_params ? FitOptions{.restarts = 1, .warm_start = state.last_params} : cfg.fit);
  }
  return trace;
}

std::vector<RunTrace> run_repeats(const RunConfig& cfg, int jobs) {
  cfg.validate();
  std::vector<RunTrace> out(static_cast<std::size_t>(cfg.repeats));
  auto one = [&](int r) { out[static_cast<std::size_t>(r)] = run(cfg, repeat_seed(cfg.seed, r), "r" + std::to_string(r)); };
  jobs = std::clamp(jobs, 1, cfg.repeats);
  if (jobs == 1) {
    for (int r = 0; r < cfg.repeats; ++r) one(r);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      omp_set_num_threads(1);
      for (int r = next++; r < cfg.repeats; r = next++) {
        try {
          one(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

double greedy_tour_length(const Matrix& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) return 0.0;
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  Eigen::Index current = 0;
  visited[0] = true;
  double total = 0.0;
  for (Eigen::Index step = 1; step < n; ++step) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (visited[static_cast<std::size_t>(j)]) continue;
      const double dist = (points.row(j) - points.row(current)).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    visited[static_cast<std::size_t>(best)] = true;
    total += std::sqrt(best_d);
    current = best;
  }
  return total;
}

Locality metric_locality(const Matrix& queries) {
  Locality out;
  const Eigen::Index n = queries.rows();
  if (n < 2) return out;
  double steps = 0.0;
  for (Eigen::Index t = 1; t < n; ++t) steps += (queries.row(t) - queries.row(t - 1)).norm();
  out.mean_step = steps / static_cast<double>(n - 1);
  out.greedy_tour = greedy_tour_length(queries);
  return out;
}

Locality metric_locality(const RunTrace& trace) { return metric_locality(trace.queries()); }

ModelSnapshot make_snapshot(const std::string& problem, Eigen::Index d, int n_points, std::uint64_t seed,
                            Eigen::Index M) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.dim = d;
  cfg.acq.method = Method::Raasp;
  cfg.acq.M = M;
  cfg.n_init = std::min(30, n_points);
  cfg.iterations = n_points - cfg.n_init;
  cfg.keep_final_model = true;
  RunTrace t = run(cfg, seed, "snapshot");
  if (!t.completed) throw Error("make_snapshot: run failed: " + t.error);
  ModelSnapshot s;
  s.problem = problem;
  s.seed = seed;
  s.model = std::move(*t.final_model);
  return s;
}

std::vector<SampleQualityRow> experiment_sample_quality(const std::vector<ModelSnapshot>& snapshots,
                                                        const std::vector<Method>& policies,
                                                        const AcquisitionConfig& base, int n_draws,
                                                        std::uint64_t seed) {
  std::vector<SampleQualityRow> rows;
  for (std::size_t m = 0; m < snapshots.size(); ++m) {
    const GpModel& model = snapshots[m].model;
    const Problem problem = make_problem(snapshots[m].problem, model.dim());
    const Incumbent inc = incumbent(model, base.incumbent);
    for (Method policy : policies) {
      AcquisitionConfig cfg = base;
      cfg.method = policy;
      cfg.use_turbo = false;
      for (int i = 0; i < n_draws; ++i) {
        const std::uint64_t member = derive_seed(seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(i)});
        const MemberResult r = acquire_member(model, cfg, inc.x0, std::nullopt, member);
        rows.push_back({static_cast<int>(m), policy, i, r.ts_max, problem.value(r.x)});
      }
    }
  }
  return rows;
}

std::vector<std::int64_t> budget_grid(std::int64_t max_budget) {
  std::vector<std::int64_t> grid;
  for (std::int64_t decade = 1; decade <= max_budget; decade *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      if (decade * m <= max_budget) grid.push_back(decade * m);
    }
    if (decade > max_budget / 10) break;
  }
  if (grid.empty() || grid.back() != max_budget) grid.push_back(max_budget);
  return grid;
}

std::vector<CurseRow> experiment_curse_of_dim(const Problem& problem, const std::vector<CandidatePolicy>& policies,
                                              std::int64_t max_budget, std::uint64_t seed) {
  if (max_budget < 1) throw ConfigError("curse-of-dim budget must be >= 1");
  const Eigen::Index d = problem.d;
  const std::vector<std::int64_t> grid = budget_grid(max_budget);
  constexpr std::int64_t kChunk = 1 << 14;
  std::vector<CurseRow> rows;

  for (CandidatePolicy policy : policies) {
    if (policy != CandidatePolicy::Sobol && policy != CandidatePolicy::Uniform) {
      throw ConfigError("curse-of-dim supports the sobol and uniform policies only");
    }
    std::optional<SobolEngine> engine;
    if (policy == CandidatePolicy::Sobol && d <= SobolEngine::kMaxDim) {
      engine.emplace(d, derive_seed(seed, Stream::Candidates));
    } else if (policy == CandidatePolicy::Sobol) {
      spdlog::warn("curse-of-dim: d = {} exceeds the Sobol table; using uniform points", d);
    }
    Vector values(kChunk);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t next_grid = 0;
    for (std::int64_t start = 0; start < max_budget; start += kChunk) {
      const std::int64_t count = std::min(kChunk, max_budget - start);
      const std::uint64_t chunk_index = static_cast<std::uint64_t>(start / kChunk);
#pragma omp parallel for schedule(static)
      for (std::int64_t block = 0; block < count; block += 512) {
        const std::int64_t len = std::min<std::int64_t>(512, count - block);
        if (engine) {
          engine->for_each(static_cast<std::uint64_t>(start + block), static_cast<std::uint64_t>(len),
                           [&](std::uint64_t i, const double* p) {
                             values[static_cast<Eigen::Index>(i - static_cast<std::uint64_t>(start))] =
                                 problem.value(Eigen::Map<const Vector>(p, d));
                           });
        } else {
          Rng rng(derive_seed(seed, {chunk_index, static_cast<std::uint64_t>(block)}));
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          Vector x(d);
          for (std::int64_t k = 0; k < len; ++k) {
            for (Eigen::Index j = 0; j < d; ++j) x[j] = unit(rng);
            values[static_cast<Eigen::Index>(block + k)] = problem.value(x);
          }
        }
      }
      for (std::int64_t k = 0; k < count; ++k) {
        best = std::max(best, values[static_cast<Eigen::Index>(k)]);
        while (next_grid < grid.size() && grid[next_grid] == start + k + 1) {
          CurseRow row;
          row.problem = problem.name;
          row.d = d;
          row.policy = policy;
          row.budget = grid[next_grid];
          row.best = best;
          row.gap = problem.optimum_value ? *problem.optimum_value - best : std::numeric_limits<double>::quiet_NaN();
          rows.push_back(row);
          ++next_grid;
        }
      }
    }
  }
  return rows;
}

std::vector<AblationGroup> ablation_driver(const AblationSpec& spec, int jobs) {
  const std::vector<Method> geometries = spec.geometries.empty() ? std::vector<Method>{spec.base.acq.method} : spec.geometries;
  const std::vector<MaskVariant> masks = spec.masks.empty() ? std::vector<MaskVariant>{spec.base.acq.mask} : spec.masks;
  std::vector<double> cs = spec.c_values;
  if (cs.empty()) cs.push_back(spec.base.acq.mask.c);

  std::vector<AblationGroup> groups;
  for (Method g : geometries) {
    for (const MaskVariant& mv : masks) {
      for (double c : cs) {
        AblationGroup group;
        group.config = spec.base;
        group.config.acq.method = g;
        group.config.acq.mask.kind = mv.kind;
        group.config.acq.mask.c = c;
        group.label = to_string(g) + "/" + to_string(mv.kind) + "/c=" + std::to_string(c);
        group.traces = run_repeats(group.config, jobs);
        groups.push_back(std::move(group));
      }
    }
  }
  return groups;
}

}  // namespace acts
