#include "acts/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "acts/error.hpp"

namespace acts {

namespace {

using json = nlohmann::ordered_json;

/// Typed access to one JSON object that remembers which keys were read, so
/// leftovers can be reported.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

CandidatePolicy policy_from_string(const std::string& s) {
  const std::string u = lower(s);
  if (u == "sobol") return CandidatePolicy::Sobol;
  if (u == "uniform") return CandidatePolicy::Uniform;
  throw ConfigError("unknown candidate policy '" + s + "' (expected sobol or uniform)");
}

IncumbentRule incumbent_from_string(const std::string& s) {
  const std::string u = lower(s);
  if (u == "max-observed") return IncumbentRule::MaxObserved;
  if (u == "max-posterior-mean") return IncumbentRule::MaxPosteriorMean;
  throw ConfigError("unknown incumbent rule '" + s + "' (expected max-observed or max-posterior-mean)");
}

std::string to_string(IncumbentRule r) {
  return r == IncumbentRule::MaxObserved ? "max-observed" : "max-posterior-mean";
}

SamplerOptions::Method sampler_from_string(const std::string& s) {
  const std::string u = lower(s);
  if (u == "dense") return SamplerOptions::Method::Dense;
  if (u == "pivoted") return SamplerOptions::Method::Pivoted;
  if (u == "auto") return SamplerOptions::Method::Auto;
  throw ConfigError("unknown sampler '" + s + "' (expected dense, pivoted or auto)");
}

std::string to_string(SamplerOptions::Method m) {
  switch (m) {
    case SamplerOptions::Method::Dense: return "dense";
    case SamplerOptions::Method::Pivoted: return "pivoted";
    case SamplerOptions::Method::Auto: return "auto";
  }
  return "dense";
}

void read_fit(const json& j, const std::string& where, FitOptions& fo) {
  Reader r(j, where);
  r.get("restarts", fo.restarts);
  r.get("max_iters", fo.max_iters);
  r.get("grad_tol", fo.grad_tol);
  r.get("initial_noise", fo.initial_noise);
  r.finish();
  if (fo.restarts < 1 || fo.max_iters < 1 || !(fo.grad_tol > 0.0) || !(fo.initial_noise > 0.0)) {
    throw ConfigError(where + ": restarts and max_iters must be >= 1, tolerances positive");
  }
}

json fit_json(const FitOptions& fo) {
  return json{{"restarts", fo.restarts}, {"max_iters", fo.max_iters}, {"grad_tol", fo.grad_tol},
              {"initial_noise", fo.initial_noise}};
}

template <class T, class F>
std::vector<T> read_list(const json* j, const std::string& where, F&& parse) {
  std::vector<T> out;
  if (!j) return out;
  if (!j->is_array()) throw ConfigError(where + ": expected a list");
  for (const auto& item : *j) out.push_back(parse(item));
  return out;
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

ExperimentConfig from_json(const json& doc) {
  ExperimentConfig cfg;
  RunConfig& rc = cfg.run;
  Reader r(doc, "config");

  r.get("problem", rc.problem);
  std::int64_t dim = rc.dim;
  r.get("dim", dim);
  rc.dim = dim;
  r.get("noise_sd", rc.noise_sd);
  std::string method = to_string(rc.acq.method);
  r.get("method", method);
  rc.acq.method = method_from_string(method);
  std::int64_t m = rc.acq.M;
  r.get("M", m);
  rc.acq.M = m;
  r.get("batch_size", rc.acq.q);
  r.get("turbo", rc.acq.use_turbo);
  r.get("raasp_c", rc.acq.raasp_c);
  std::string inc = to_string(rc.acq.incumbent);
  r.get("incumbent", inc);
  rc.acq.incumbent = incumbent_from_string(inc);
  r.get("iterations", rc.iterations);
  r.get("n_init", rc.n_init);
  r.get("repeats", rc.repeats);
  r.get("seed", rc.seed);
  r.get("warm_start_refit", rc.warm_start_refit);
  r.get("diagnostic_draws", rc.diagnostic_draws);
  r.get("jobs", cfg.jobs);
  r.get("checkpoints", cfg.checkpoints);

  if (const json* mj = r.child("mask")) {
    Reader mr(*mj, "config.mask");
    std::string variant = to_string(rc.acq.mask.kind);
    mr.get("variant", variant);
    rc.acq.mask.kind = mask_kind_from_string(variant);
    mr.get("c", rc.acq.mask.c);
    mr.finish();
  }
  if (const json* sj = r.child("sampler")) {
    Reader sr(*sj, "config.sampler");
    std::string name = to_string(rc.acq.sampler.method);
    sr.get("method", name);
    rc.acq.sampler.method = sampler_from_string(name);
    sr.get("pivot_tolerance", rc.acq.sampler.pivot_tolerance);
    sr.get("max_rank_fraction", rc.acq.sampler.max_rank_fraction);
    sr.get("first_jitter_level", rc.acq.sampler.first_jitter_level);
    sr.finish();
  }
  if (const json* tj = r.child("turbo_settings")) {
    Reader tr(*tj, "config.turbo_settings");
    tr.get("length_init", rc.turbo.length_init);
    tr.get("length_min", rc.turbo.length_min);
    tr.get("length_max", rc.turbo.length_max);
    tr.get("success_tol", rc.turbo.success_tol);
    tr.finish();
    if (!(rc.turbo.length_min > 0.0 && rc.turbo.length_min <= rc.turbo.length_init &&
          rc.turbo.length_init <= rc.turbo.length_max) ||
        rc.turbo.success_tol < 1) {
      throw ConfigError("config.turbo_settings: need 0 < length_min <= length_init <= length_max, success_tol >= 1");
    }
  }
  if (const json* fj = r.child("fit")) read_fit(*fj, "config.fit", rc.fit);
  if (const json* fj = r.child("refit")) read_fit(*fj, "config.refit", rc.refit);

  if (const json* qj = r.child("sample_quality")) {
    SampleQualitySettings& s = cfg.sample_quality;
    Reader sr(*qj, "config.sample_quality");
    sr.get("problems", s.problems);
    std::int64_t sd = s.dim;
    sr.get("dim", sd);
    s.dim = sd;
    sr.get("models", s.models);
    sr.get("draws", s.draws);
    sr.get("snapshot_points", s.snapshot_points);
    std::int64_t sm = s.snapshot_M;
    sr.get("snapshot_M", sm);
    s.snapshot_M = sm;
    if (const json* pj = sr.child("policies")) {
      s.policies = read_list<Method>(pj, "config.sample_quality.policies",
                                     [](const json& j) { return method_from_string(as_string(j, "policy")); });
    }
    sr.finish();
    if (s.models < 1 || s.draws < 1 || s.snapshot_points < 2 || s.snapshot_M < 1 || s.policies.empty()) {
      throw ConfigError("config.sample_quality: counts must be positive and policies non-empty");
    }
  }
  if (const json* cj = r.child("curse_of_dim")) {
    CurseSettings& s = cfg.curse_of_dim;
    Reader cr(*cj, "config.curse_of_dim");
    if (const json* pj = cr.child("problems")) {
      s.problems = read_list<std::pair<std::string, Eigen::Index>>(pj, "config.curse_of_dim.problems", [](const json& j) {
        Reader pr(j, "config.curse_of_dim.problems[]");
        std::string name;
        std::int64_t d = 0;
        pr.get("name", name);
        pr.get("dim", d);
        pr.finish();
        return std::pair<std::string, Eigen::Index>{name, d};
      });
    }
    cr.get("budget", s.budget);
    if (const json* pj = cr.child("policies")) {
      s.policies = read_list<CandidatePolicy>(pj, "config.curse_of_dim.policies",
                                              [](const json& j) { return policy_from_string(as_string(j, "policy")); });
    }
    cr.finish();
    if (s.budget < 1) throw ConfigError("config.curse_of_dim.budget must be >= 1");
    for (const auto& [name, d] : s.problems) make_problem(name, d);
  }
  if (const json* aj = r.child("ablate")) {
    AblationSettings& s = cfg.ablate;
    Reader ar(*aj, "config.ablate");
    s.masks = read_list<MaskKind>(ar.child("masks"), "config.ablate.masks",
                                  [](const json& j) { return mask_kind_from_string(as_string(j, "mask")); });
    s.c_values = read_list<std::string>(ar.child("c"), "config.ablate.c", [](const json& j) {
      if (j.is_number()) return json(j).dump();
      return as_string(j, "c");
    });
    s.geometries = read_list<Method>(ar.child("geometries"), "config.ablate.geometries",
                                     [](const json& j) { return method_from_string(as_string(j, "geometry")); });
    ar.finish();
    for (const auto& c : s.c_values) resolve_c(c, rc.dim);
  }
  r.finish();

  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  rc.validate();
  return cfg;
}

}  // namespace

double resolve_c(const std::string& expr, Eigen::Index d) {
  std::string e;
  for (char ch : expr) {
    if (!std::isspace(static_cast<unsigned char>(ch))) e.push_back(ch);
  }
  double c = 0.0;
  if (e == "d") {
    c = static_cast<double>(d);
  } else if (e == "d/10") {
    c = static_cast<double>(d) / 10.0;
  } else {
    std::size_t used = 0;
    try {
      c = std::stod(e, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != e.size() || e.empty()) throw ConfigError("bad mask coefficient '" + expr + "'");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("mask coefficient must be positive: '" + expr + "'");
  return c;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("version")) return from_json(doc["config"]);
  return from_json(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  const RunConfig& rc = cfg.run;
  json j;
  j["problem"] = rc.problem;
  j["dim"] = rc.dim;
  j["noise_sd"] = rc.noise_sd;
  j["method"] = to_string(rc.acq.method);
  j["M"] = rc.acq.M;
  j["batch_size"] = rc.acq.q;
  j["turbo"] = rc.acq.use_turbo;
  j["mask"] = json{{"variant", to_string(rc.acq.mask.kind)}, {"c", rc.acq.mask.c}};
  j["raasp_c"] = rc.acq.raasp_c;
  j["incumbent"] = to_string(rc.acq.incumbent);
  j["sampler"] = json{{"method", to_string(rc.acq.sampler.method)},
                      {"pivot_tolerance", rc.acq.sampler.pivot_tolerance},
                      {"max_rank_fraction", rc.acq.sampler.max_rank_fraction},
                      {"first_jitter_level", rc.acq.sampler.first_jitter_level}};
  j["iterations"] = rc.iterations;
  j["n_init"] = rc.n_init;
  j["repeats"] = rc.repeats;
  j["seed"] = rc.seed;
  j["jobs"] = cfg.jobs;
  j["turbo_settings"] = json{{"length_init", rc.turbo.length_init},
                             {"length_min", rc.turbo.length_min},
                             {"length_max", rc.turbo.length_max},
                             {"success_tol", rc.turbo.success_tol}};
  j["fit"] = fit_json(rc.fit);
  j["refit"] = fit_json(rc.refit);
  j["warm_start_refit"] = rc.warm_start_refit;
  j["diagnostic_draws"] = rc.diagnostic_draws;
  j["checkpoints"] = cfg.checkpoints;

  const SampleQualitySettings& sq = cfg.sample_quality;
  json policies = json::array();
  for (Method m : sq.policies) policies.push_back(to_string(m));
  j["sample_quality"] = json{{"problems", sq.problems},   {"dim", sq.dim},
                             {"models", sq.models},       {"draws", sq.draws},
                             {"snapshot_points", sq.snapshot_points}, {"snapshot_M", sq.snapshot_M},
                             {"policies", policies}};

  json problems = json::array();
  for (const auto& [name, d] : cfg.curse_of_dim.problems) problems.push_back(json{{"name", name}, {"dim", d}});
  json cpolicies = json::array();
  for (CandidatePolicy p : cfg.curse_of_dim.policies) cpolicies.push_back(to_string(p));
  j["curse_of_dim"] = json{{"problems", problems}, {"budget", cfg.curse_of_dim.budget}, {"policies", cpolicies}};

  json masks = json::array();
  for (MaskKind k : cfg.ablate.masks) masks.push_back(to_string(k));
  json geoms = json::array();
  for (Method m : cfg.ablate.geometries) geoms.push_back(to_string(m));
  j["ablate"] = json{{"masks", masks}, {"c", cfg.ablate.c_values}, {"geometries", geoms}};
  return j.dump(2);
}

}  // namespace acts
