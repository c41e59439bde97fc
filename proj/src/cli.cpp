#include "acts/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <omp.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "acts/config.hpp"
#include "acts/error.hpp"
#include "acts/harness.hpp"
#include "acts/rng.hpp"

#ifndef ACTS_VERSION
#define ACTS_VERSION "0.0.0"
#endif
#ifndef ACTS_GIT_HASH
#define ACTS_GIT_HASH "unknown"
#endif

namespace fs = std::filesystem;

namespace acts {

const char* library_version() { return ACTS_VERSION; }
const char* git_revision() { return ACTS_GIT_HASH; }

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return fmt::format("{}", v);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<int> jobs;
  std::optional<std::string> method;
  std::optional<std::string> problem;
  std::optional<std::int64_t> dim;
  std::optional<int> iterations;
  std::optional<int> batch_size;
  std::optional<bool> turbo;
  std::optional<std::string> mask_variant;
  std::optional<double> mask_c;
  std::optional<std::int64_t> candidates;
  std::optional<std::int64_t> budget;
  int verbosity = 0;
};

ExperimentConfig resolve(const Overrides& o, const std::string& subcommand) {
  ExperimentConfig cfg = o.config_path ? load_config(*o.config_path) : ExperimentConfig{};
  RunConfig& rc = cfg.run;
  if (subcommand == "batch" && !o.batch_size && rc.acq.q == 1) rc.acq.q = 10;
  if (o.seed) rc.seed = *o.seed;
  if (o.repeats) rc.repeats = *o.repeats;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.method) rc.acq.method = method_from_string(*o.method);
  if (o.problem) rc.problem = *o.problem;
  if (o.dim) rc.dim = *o.dim;
  if (o.iterations) rc.iterations = *o.iterations;
  if (o.batch_size) rc.acq.q = *o.batch_size;
  if (o.turbo) rc.acq.use_turbo = *o.turbo;
  if (o.mask_variant) rc.acq.mask.kind = mask_kind_from_string(*o.mask_variant);
  if (o.mask_c) rc.acq.mask.c = *o.mask_c;
  if (o.candidates) rc.acq.M = *o.candidates;
  if (o.budget) cfg.curse_of_dim.budget = *o.budget;
  if (o.dim && subcommand == "sample-quality") cfg.sample_quality.dim = *o.dim;

  if (cfg.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (cfg.curse_of_dim.budget < 1) throw ConfigError("--budget must be >= 1");
  if (subcommand == "batch" && rc.acq.q < 2) throw ConfigError("batch needs a batch size >= 2");
  if (subcommand == "gradient-uncertainty" && !is_adaptive(rc.acq.method)) {
    throw ConfigError("gradient-uncertainty needs an acts-* method");
  }
  rc.validate();
  if (subcommand != "sample-quality" && subcommand != "curse-of-dim") {
    rc.problem = make_problem(rc.problem, rc.dim).name;
  }
  // round-trip through the JSON form so meta.json reproduces the run exactly
  return config_from_json_text(config_to_json_text(cfg));
}

fs::path output_dir(const Overrides& o, const std::string& subcommand) {
  if (o.out) return fs::path(*o.out);
  const char* root = std::getenv("ACTS_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "results") / subcommand;
}

void write_meta(const fs::path& dir, const std::string& subcommand, const ExperimentConfig& cfg) {
  nlohmann::ordered_json meta;
  meta["subcommand"] = subcommand;
  meta["version"] = library_version();
  meta["git_hash"] = git_revision();
  meta["config"] = nlohmann::ordered_json::parse(config_to_json_text(cfg));
  write_file_atomic((dir / "meta.json").string(), meta.dump(2) + "\n");
}

/// Runs fn(i) for i in [0, n) on `jobs` threads; each thread keeps OpenMP to
/// one thread so kernels do not oversubscribe.
template <class F>
void parallel_for(int n, int jobs, F&& fn) {
  jobs = std::clamp(jobs, 1, std::max(n, 1));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      omp_set_num_threads(1);
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct LabeledTrace {
  const RunTrace* trace;
  std::string group;
  const RunConfig* config;
};

std::string traces_csv(const std::vector<LabeledTrace>& traces) {
  std::string out = "run_id,seed,t,best_so_far,y_t,log_volume,tr_length,grad_cov_trace,method,problem,dim,group\n";
  for (const auto& lt : traces) {
    const RunConfig& c = *lt.config;
    for (const TraceRecord& r : lt.trace->records) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", lt.trace->run_id, lt.trace->seed, r.t,
                         csv_number(r.best_so_far), csv_number(r.y), csv_number(r.log_volume), csv_number(r.tr_length),
                         csv_number(r.grad_cov_trace), to_string(c.acq.method), c.problem, c.dim, lt.group);
    }
  }
  return out;
}

void write_queries(const fs::path& dir, const RunTrace& trace) {
  std::string out = "run_id,seed,t";
  const Eigen::Index d = trace.records.empty() ? 0 : trace.records.front().x.size();
  for (Eigen::Index j = 0; j < d; ++j) out += fmt::format(",x{}", j);
  out += "\n";
  for (const TraceRecord& r : trace.records) {
    out += fmt::format("{},{},{}", trace.run_id, trace.seed, r.t);
    for (Eigen::Index j = 0; j < d; ++j) out += "," + csv_number(r.x[j]);
    out += "\n";
  }
  write_file_atomic((dir / "queries" / (trace.run_id + ".csv")).string(), out);
}

bool all_completed(const std::vector<RunTrace>& traces) {
  bool ok = true;
  for (const auto& t : traces) {
    if (!t.completed) {
      spdlog::error("{} did not complete: {}", t.run_id, t.error);
      ok = false;
    }
  }
  return ok;
}

int cmd_runs(const std::string& sub, const ExperimentConfig& cfg, const fs::path& dir) {
  RunConfig rc = cfg.run;
  if (sub == "gradient-uncertainty") {
    for (int c : cfg.checkpoints) {
      if (c <= rc.budget()) rc.diagnostic_checkpoints.push_back(c);
    }
  }
  std::vector<RunTrace> traces(static_cast<std::size_t>(rc.repeats));
  parallel_for(rc.repeats, cfg.jobs, [&](int r) {
    traces[static_cast<std::size_t>(r)] = run(rc, repeat_seed(rc.seed, r), "r" + std::to_string(r));
  });

  std::vector<LabeledTrace> labeled;
  for (const auto& t : traces) labeled.push_back({&t, "", &rc});
  write_file_atomic((dir / "results.csv").string(), traces_csv(labeled));
  for (const auto& t : traces) write_queries(dir, t);

  if (sub == "locality") {
    std::string out = "run_id,seed,method,problem,dim,mean_step,greedy_tour\n";
    for (const auto& t : traces) {
      const Locality loc = metric_locality(t);
      out += fmt::format("{},{},{},{},{},{},{}\n", t.run_id, t.seed, to_string(rc.acq.method), rc.problem, rc.dim,
                         csv_number(loc.mean_step), csv_number(loc.greedy_tour));
    }
    write_file_atomic((dir / "locality.csv").string(), out);
  }
  if (sub == "gradient-uncertainty") {
    std::string out = "run_id,seed,t,cov_trace,minority_fraction,method,problem,dim\n";
    for (const auto& t : traces) {
      for (const GradientDiagnostic& g : metric_gradient_uncertainty(t)) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", t.run_id, t.seed, g.t, csv_number(g.cov_trace),
                           csv_number(g.minority_fraction), to_string(rc.acq.method), rc.problem, rc.dim);
      }
    }
    write_file_atomic((dir / "gradient_uncertainty.csv").string(), out);
  }
  return all_completed(traces) ? kExitOk : kExitRuntime;
}

int cmd_ablate(const ExperimentConfig& cfg, const fs::path& dir) {
  AblationSpec spec;
  spec.base = cfg.run;
  spec.geometries = cfg.ablate.geometries;
  for (MaskKind k : cfg.ablate.masks) spec.masks.push_back(MaskVariant{k, cfg.run.acq.mask.c});
  for (const auto& c : cfg.ablate.c_values) spec.c_values.push_back(resolve_c(c, cfg.run.dim));
  const std::vector<AblationGroup> groups = ablation_driver(spec, cfg.jobs);

  std::vector<RunTrace> renamed;
  std::vector<std::string> labels;
  std::vector<const RunConfig*> configs;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const RunTrace& t : groups[g].traces) {
      RunTrace copy = t;
      copy.run_id = fmt::format("g{}-{}", g, t.run_id);
      renamed.push_back(std::move(copy));
      labels.push_back(groups[g].label);
      configs.push_back(&groups[g].config);
    }
  }
  std::vector<LabeledTrace> labeled;
  for (std::size_t i = 0; i < renamed.size(); ++i) labeled.push_back({&renamed[i], labels[i], configs[i]});
  write_file_atomic((dir / "results.csv").string(), traces_csv(labeled));
  for (const auto& t : renamed) write_queries(dir, t);
  return all_completed(renamed) ? kExitOk : kExitRuntime;
}

int cmd_sample_quality(const ExperimentConfig& cfg, const fs::path& dir) {
  const SampleQualitySettings& s = cfg.sample_quality;
  std::string out = "run_id,seed,problem,dim,model,policy,draw,ts_max,objective\n";
  for (const std::string& name : s.problems) {
    make_problem(name, s.dim);
    std::vector<ModelSnapshot> snaps(static_cast<std::size_t>(s.models));
    parallel_for(s.models, cfg.jobs, [&](int k) {
      snaps[static_cast<std::size_t>(k)] =
          make_snapshot(name, s.dim, s.snapshot_points, repeat_seed(cfg.run.seed, k), s.snapshot_M);
    });
    std::vector<std::vector<SampleQualityRow>> per_model(snaps.size());
    parallel_for(s.models, cfg.jobs, [&](int k) {
      std::vector<ModelSnapshot> one{snaps[static_cast<std::size_t>(k)]};
      per_model[static_cast<std::size_t>(k)] = experiment_sample_quality(
          one, s.policies, cfg.run.acq, s.draws, derive_seed(cfg.run.seed, {0x7371ULL, static_cast<std::uint64_t>(k)}));
    });
    for (int k = 0; k < s.models; ++k) {
      const ModelSnapshot& snap = snaps[static_cast<std::size_t>(k)];
      for (const SampleQualityRow& row : per_model[static_cast<std::size_t>(k)]) {
        out += fmt::format("{}-m{},{},{},{},{},{},{},{},{}\n", name, k, snap.seed, name, s.dim, k,
                           to_string(row.policy), row.draw, csv_number(row.ts_max), csv_number(row.objective));
      }
    }
  }
  write_file_atomic((dir / "sample_quality.csv").string(), out);
  return kExitOk;
}

int cmd_curse(const ExperimentConfig& cfg, const fs::path& dir) {
  const CurseSettings& s = cfg.curse_of_dim;
  std::string out = "run_id,seed,problem,dim,policy,budget,best,gap\n";
  for (const auto& [name, d] : s.problems) {
    const Problem p = make_problem(name, d);
    const std::uint64_t seed = derive_seed(cfg.run.seed, {0x636fULL, static_cast<std::uint64_t>(d)});
    for (const CurseRow& row : experiment_curse_of_dim(p, s.policies, s.budget, seed)) {
      out += fmt::format("{}-d{},{},{},{},{},{},{},{}\n", p.name, d, seed, p.name, d, to_string(row.policy), row.budget,
                         csv_number(row.best), csv_number(row.gap));
    }
  }
  write_file_atomic((dir / "curse_of_dim.csv").string(), out);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Adaptive candidate Thompson sampling experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()) + " (" + git_revision() + ")");
  Overrides o;
  bool turbo = false, no_turbo = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "Optimize one problem with one method over several seeds"},
      {"batch", "Like run with batch size q >= 2 (default 10)"},
      {"sample-quality", "Compare Thompson-sample maxima of candidate policies on fitted models"},
      {"curse-of-dim", "Best objective found by Sobol/uniform points versus budget"},
      {"locality", "Mean step length and greedy tour length of the query sequence"},
      {"gradient-uncertainty", "Gradient covariance trace and sign disagreement at checkpoints"},
      {"ablate", "Run the cross product of mask variants, c values and search geometries"},
      {"volume-trace", "Run and record the log volume of every search region"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (default $ACTS_OUTPUT_ROOT/<subcommand>)");
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--repeats", o.repeats, "Number of seeds");
    sub->add_option("--jobs", o.jobs, "Parallel workers");
    sub->add_option("--method", o.method, "sobol, raasp, acts-sobol, acts-raasp, acts-line, acts-line-masked");
    sub->add_option("--problem", o.problem, "Ackley, Levy, Rosenbrock, Rastrigin, Hartmann6, Quadratic, Bimodal");
    sub->add_option("--dim", o.dim, "Problem dimension");
    sub->add_option("--iterations", o.iterations, "BO iterations");
    sub->add_option("--batch-size", o.batch_size, "Points per iteration");
    sub->add_flag("--turbo", turbo, "Intersect with a trust region");
    sub->add_flag("--no-turbo", no_turbo, "Disable the trust region");
    sub->add_option("--mask-variant", o.mask_variant, "L1, L2, L3, TopK, Softmax");
    sub->add_option("--mask-c", o.mask_c, "Expected number of perturbed dimensions");
    sub->add_option("--candidates", o.candidates, "Candidate points per Thompson sample (M)");
    sub->add_option("--budget", o.budget, "Largest point budget (curse-of-dim)");
    sub->add_flag("-v,--verbose", o.verbosity, "More logging");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (turbo && no_turbo) {
    std::cerr << "error: --turbo and --no-turbo are exclusive\n";
    return kExitConfig;
  }
  if (turbo) o.turbo = true;
  if (no_turbo) o.turbo = false;
  spdlog::set_level(o.verbosity > 0 ? spdlog::level::debug : spdlog::level::warn);

  const std::string sub = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  fs::path dir;
  try {
    cfg = resolve(o, sub);
    dir = output_dir(o, sub);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    fs::create_directories(dir);
    write_meta(dir, sub, cfg);
    if (sub == "sample-quality") return cmd_sample_quality(cfg, dir);
    if (sub == "curse-of-dim") return cmd_curse(cfg, dir);
    if (sub == "ablate") return cmd_ablate(cfg, dir);
    return cmd_runs(sub, cfg, dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace acts
