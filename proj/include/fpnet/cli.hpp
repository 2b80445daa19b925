#pragma once

// Configuration handling and the run / verify / compare commands. The
// executable in tools/ only parses flags and forwards here.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fpnet/engine.hpp"
#include "fpnet/error.hpp"
#include "fpnet/interconnect.hpp"
#include "fpnet/io.hpp"
#include "fpnet/monitor.hpp"
#include "fpnet/oracles.hpp"
#include "fpnet/problems.hpp"

namespace fpnet::cli {

using nlohmann::json;

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNotConverged = 2 };

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"lasso_huber",       "lasso_augmented", "minimax_fir",
                                              "minimax_fir_split", "svm",             "sparse_equalizer"};
  return names;
}

struct RunConfig {
  std::string problem = "lasso_huber";
  DelayMode mode = DelayMode::synchronous;
  double p = 0.1;
  std::optional<double> gamma;  // per-problem default when unset
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::int64_t max_iters = 200000;
  json instance = json::object();

  double effective_gamma() const { return gamma.value_or(problem == "lasso_huber" ? 1.0 : 0.5); }

  void validate() const {
    bool known = false;
    for (const auto& n : problem_names()) known = known || n == problem;
    if (!known) throw ConfigError("problem: unknown problem '" + problem + "'");
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p: must lie in (0, 1], got " + format_double(p));
    const double g = effective_gamma();
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("gamma: must lie in (0, 1], got " + format_double(g));
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("tol: must be > 0");
    if (max_iters < 0) throw ConfigError("max_iters: must be >= 0");
    if (!instance.is_object()) throw ConfigError("instance: must be a JSON object");
  }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["mode"] = c.mode == DelayMode::synchronous ? "sync" : "async";
  j["p"] = c.p;
  j["gamma"] = c.effective_gamma();
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["max_iters"] = c.max_iters;
  j["instance"] = c.instance;
  return j;
}

namespace detail {

inline double number(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(path + key + ": expected a number");
  return j[key].get<double>();
}

inline std::int64_t integer(const json& j, const std::string& key, std::int64_t fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(path + key + ": expected an integer");
  return j[key].get<std::int64_t>();
}

inline void allow_only(const json& j, const std::set<std::string>& keys, const std::string& path) {
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ConfigError(path + k + ": unknown field");
  }
}

inline DelayMode parse_mode(const std::string& s) {
  if (s == "sync" || s == "synchronous") return DelayMode::synchronous;
  if (s == "async" || s == "asynchronous") return DelayMode::asynchronous;
  throw ConfigError("mode: expected 'sync' or 'async', got '" + s + "'");
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  detail::allow_only(j, {"problem", "mode", "p", "gamma", "seed", "tol", "max_iters", "instance"}, "");
  RunConfig c;
  if (j.contains("problem")) {
    if (!j["problem"].is_string()) throw ConfigError("problem: expected a string");
    c.problem = j["problem"].get<std::string>();
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw ConfigError("mode: expected a string");
    c.mode = detail::parse_mode(j["mode"].get<std::string>());
  }
  c.p = detail::number(j, "p", c.p, "");
  if (j.contains("gamma")) c.gamma = detail::number(j, "gamma", 0.5, "");
  const std::int64_t seed = detail::integer(j, "seed", 0, "");
  if (seed < 0) throw ConfigError("seed: must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.tol = detail::number(j, "tol", c.tol, "");
  c.max_iters = detail::integer(j, "max_iters", c.max_iters, "");
  if (j.contains("instance")) c.instance = j["instance"];
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Problem construction from the "instance" object

struct LassoCase {
  LassoInstance inst;
  LassoSystem built;
  bool huber = true;
};
struct FirCase {
  FirSpec spec;
  FirSystem built;
};
struct SplitFirCase {
  FirSpec spec;
  double rho = 0.01;
  SplitFirSystem built;
};
struct SvmCase {
  SvmInstance inst;
  SvmSystem built;
};
struct EqualizerCase {
  EqualizerInstance inst;
  EqualizerSystem built;
};

using ProblemCase = std::variant<LassoCase, FirCase, SplitFirCase, SvmCase, EqualizerCase>;

inline System& system_of(ProblemCase& pc) {
  return std::visit([](auto& c) -> System& { return c.built.system; }, pc);
}

/// Primal solution estimate read from a state vector.
inline Eigen::VectorXd solution_of(const ProblemCase& pc, const Eigen::VectorXd& d) {
  return std::visit(
      [&](const auto& c) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LassoCase> || std::is_same_v<T, FirCase> || std::is_same_v<T, SplitFirCase>) {
          return c.built.coefficients(d);
        } else if constexpr (std::is_same_v<T, SvmCase>) {
          return c.built.consensus_model(d);
        } else {
          return c.built.equalizer(d);
        }
      },
      pc);
}

namespace detail {

inline LassoInstance lasso_from_json(const json& j) {
  const std::string path = "instance.";
  allow_only(j, {"m", "n", "data_seed", "nonzeros", "noise", "lambda", "rho", "epsilon", "A", "y"}, path);
  LassoInstance inst;
  if (j.contains("A") || j.contains("y")) {
    if (!j.contains("A") || !j.contains("y")) throw ConfigError("instance.A: A and y must be given together");
    inst.A = matrix_from_json(j["A"], "instance.A");
    inst.y = vector_from_json(j["y"], "instance.y");
  } else {
    const auto m = integer(j, "m", 10, path);
    const auto n = integer(j, "n", 20, path);
    if (m < 1) throw ConfigError("instance.m: must be >= 1");
    if (n < 1) throw ConfigError("instance.n: must be >= 1");
    const auto seed = integer(j, "data_seed", 1, path);
    if (seed < 0) throw ConfigError("instance.data_seed: must be >= 0");
    const auto nz = integer(j, "nonzeros", 3, path);
    if (nz < 0) throw ConfigError("instance.nonzeros: must be >= 0");
    inst = make_lasso_instance(m, n, static_cast<std::uint64_t>(seed), nz, number(j, "noise", 0.01, path));
  }
  inst.lambda = number(j, "lambda", inst.lambda, path);
  inst.rho = number(j, "rho", inst.rho, path);
  inst.epsilon = number(j, "epsilon", inst.epsilon, path);
  if (!(inst.lambda >= 0.0)) throw ConfigError("instance.lambda: must be >= 0");
  if (!(inst.rho >= 0.0)) throw ConfigError("instance.rho: must be >= 0");
  if (!(inst.epsilon > 0.0)) throw ConfigError("instance.epsilon: must be > 0");
  return inst;
}

inline FirSpec fir_from_json(const json& j, bool split) {
  const std::string path = "instance.";
  std::set<std::string> keys{"num_taps", "passband_edge", "stopband_edge", "grid_size", "passband_weight",
                             "stopband_weight"};
  if (split) keys.insert("rho");
  allow_only(j, keys, path);
  FirSpec s;
  s.num_taps = static_cast<int>(integer(j, "num_taps", s.num_taps, path));
  s.passband_edge = number(j, "passband_edge", s.passband_edge, path);
  s.stopband_edge = number(j, "stopband_edge", s.stopband_edge, path);
  s.grid_size = static_cast<int>(integer(j, "grid_size", s.grid_size, path));
  s.passband_weight = number(j, "passband_weight", s.passband_weight, path);
  s.stopband_weight = number(j, "stopband_weight", s.stopband_weight, path);
  if (s.num_taps < 1 || s.num_taps % 2 == 0) throw ConfigError("instance.num_taps: must be a positive odd integer");
  if (s.grid_size < 2) throw ConfigError("instance.grid_size: must be >= 2");
  if (!(s.passband_edge > 0.0 && s.passband_edge < s.stopband_edge && s.stopband_edge < std::numbers::pi)) {
    throw ConfigError("instance.passband_edge: need 0 < passband_edge < stopband_edge < pi");
  }
  s.validate();
  return s;
}

inline SvmInstance svm_from_json(const json& j) {
  const std::string path = "instance.";
  allow_only(j, {"agents", "degree", "data_seed", "graph_seed", "separation", "rho", "C", "features", "labels"}, path);
  const auto agents = integer(j, "agents", 30, path);
  const auto degree = integer(j, "degree", 4, path);
  const auto seed = integer(j, "data_seed", 7, path);
  const auto graph_seed = integer(j, "graph_seed", 0, path);
  if (agents < 2) throw ConfigError("instance.agents: must be >= 2");
  if (seed < 0) throw ConfigError("instance.data_seed: must be >= 0");
  if (graph_seed < 0) throw ConfigError("instance.graph_seed: must be >= 0");
  SvmInstance inst = make_svm_instance(static_cast<int>(agents), static_cast<std::uint64_t>(seed),
                                       number(j, "separation", 4.0, path), number(j, "rho", 0.01, path),
                                       number(j, "C", 1.0, path), static_cast<int>(degree));
  if (graph_seed != 0) {
    inst.graph = make_regular_graph(static_cast<int>(agents), static_cast<int>(degree),
                                    static_cast<std::uint64_t>(graph_seed));
  }
  if (j.contains("features") || j.contains("labels")) {
    if (!j.contains("features") || !j.contains("labels")) {
      throw ConfigError("instance.features: features and labels must be given together");
    }
    inst.features = matrix_from_json(j["features"], "instance.features");
    inst.labels = vector_from_json(j["labels"], "instance.labels");
    if (inst.features.rows() != agents) throw ConfigError("instance.features: need one row per agent");
  }
  if (!(inst.rho > 0.0)) throw ConfigError("instance.rho: must be > 0");
  if (!(inst.C >= 0.0)) throw ConfigError("instance.C: must be >= 0");
  return inst;
}

inline EqualizerInstance equalizer_from_json(const json& j) {
  const std::string path = "instance.";
  allow_only(j,
             {"response", "response_length", "taps", "delay", "envelope", "rho", "notch_width", "rho_upper",
              "rho_lower"},
             path);
  Eigen::VectorXd g;
  if (j.contains("response")) {
    g = vector_from_json(j["response"], "instance.response");
  } else {
    const auto len = integer(j, "response_length", 32, path);
    if (len < 1) throw ConfigError("instance.response_length: must be >= 1");
    g = synthetic_response(static_cast<int>(len));
  }
  const auto taps = integer(j, "taps", 16, path);
  if (taps < 1) throw ConfigError("instance.taps: must be >= 1");
  const double env = number(j, "envelope", 0.1, path);
  if (!(env >= 0.0)) throw ConfigError("instance.envelope: must be >= 0");
  EqualizerInstance inst = make_equalizer_instance(g, static_cast<int>(taps), env);
  inst.delay = static_cast<int>(integer(j, "delay", 0, path));
  if (inst.delay < 0 || inst.delay >= inst.outputs()) throw ConfigError("instance.delay: outside the output range");
  inst.rho = number(j, "rho", inst.rho, path);
  inst.notch_width = number(j, "notch_width", inst.notch_width, path);
  inst.rho_upper = number(j, "rho_upper", inst.rho_upper, path);
  inst.rho_lower = number(j, "rho_lower", inst.rho_lower, path);
  if (!(inst.notch_width > 0.0)) throw ConfigError("instance.notch_width: must be > 0");
  if (!(inst.rho >= 0.0)) throw ConfigError("instance.rho: must be >= 0");
  if (!(inst.rho_upper >= 0.0)) throw ConfigError("instance.rho_upper: must be >= 0");
  if (!(inst.rho_lower >= 0.0)) throw ConfigError("instance.rho_lower: must be >= 0");
  return inst;
}

}  // namespace detail

inline ProblemCase build_problem(const RunConfig& cfg) {
  cfg.validate();
  const json& j = cfg.instance;
  ProblemCase pc = [&]() -> ProblemCase {
    if (cfg.problem == "lasso_huber" || cfg.problem == "lasso_augmented") {
      const bool huber = cfg.problem == "lasso_huber";
      LassoInstance inst = detail::lasso_from_json(j);
      LassoSystem built = huber ? build_lasso_huber(inst) : build_lasso_augmented(inst);
      return LassoCase{std::move(inst), std::move(built), huber};
    }
    if (cfg.problem == "minimax_fir") {
      const FirSpec spec = detail::fir_from_json(j, false);
      return FirCase{spec, build_minimax_fir(spec)};
    }
    if (cfg.problem == "minimax_fir_split") {
      const FirSpec spec = detail::fir_from_json(j, true);
      const double rho = detail::number(j, "rho", 0.01, "instance.");
      if (!(rho > 0.0)) throw ConfigError("instance.rho: must be > 0");
      return SplitFirCase{spec, rho, build_minimax_fir_split(spec, rho)};
    }
    if (cfg.problem == "svm") {
      SvmInstance inst = detail::svm_from_json(j);
      SvmSystem built = build_svm_decentralized(inst);
      return SvmCase{std::move(inst), std::move(built)};
    }
    EqualizerInstance inst = detail::equalizer_from_json(j);
    EqualizerSystem built = build_sparse_equalizer(inst);
    return EqualizerCase{std::move(inst), std::move(built)};
  }();
  system_of(pc).gamma = cfg.effective_gamma();
  return pc;
}

/// Oracle-derived fixed point, where the problem has a closed-form one.
inline std::optional<Eigen::VectorXd> oracle_fixed_point(const ProblemCase& pc) {
  if (const auto* lc = std::get_if<LassoCase>(&pc)) {
    const OracleSolution sol = lc->huber ? oracle_lasso_huber(lc->inst) : oracle_lasso(lc->inst);
    return lasso_fixed_point(lc->inst, sol.x);
  }
  return std::nullopt;
}

/// d* from the oracle when available, else a long synchronous run at 1e-12.
inline Eigen::VectorXd reference_fixed_point(ProblemCase& pc, std::int64_t max_iters) {
  if (auto d = oracle_fixed_point(pc)) return *d;
  const RunResult r = run(system_of(pc), DelayBank::synchronous(), 1e-12, max_iters);
  if (!r.converged) {
    throw NotFixedPointError("reference run did not converge within " + std::to_string(max_iters) + " iterations",
                             r.trace.empty() ? 0.0 : r.trace.back().self_residual);
  }
  return r.state.d;
}

inline DelayBank make_bank(const RunConfig& cfg) {
  return cfg.mode == DelayMode::synchronous ? DelayBank::synchronous() : DelayBank::asynchronous(cfg.p, cfg.seed);
}

// ---------------------------------------------------------------------------
// Commands

struct CommandOutput {
  int exit_code = kSuccess;
  json report;
};

inline std::filesystem::path prepare_out(const std::string& out) {
  std::filesystem::path dir(out.empty() ? "." : out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("out: cannot create directory '" + dir.string() + "'");
  return dir;
}

/// Runs the configured experiment; writes trace.csv and summary.json.
inline CommandOutput cmd_run(const RunConfig& cfg, const std::string& out_dir) {
  ProblemCase pc = build_problem(cfg);
  const System& sys = system_of(pc);
  RunOptions opts;
  opts.reference = oracle_fixed_point(pc);
  opts.record_objective = true;
  opts.force_readout = true;
  const RunResult r = run(sys, make_bank(cfg), cfg.tol, cfg.max_iters, opts);

  json summary;
  summary["converged"] = r.converged;
  summary["diverged"] = r.diverged;
  summary["message"] = r.message;
  summary["iterations"] = r.state.iter;
  summary["normalized_iterations"] = r.state.normalized_iter;
  summary["final_residual"] = r.trace.empty() ? json(nullptr) : json(r.trace.back().self_residual);
  std::vector<double> a, b;
  for (const auto& pr : r.readout) {
    a.push_back(pr.a);
    b.push_back(pr.b);
  }
  summary["readout"] = {{"a", a}, {"b", b}};
  summary["solution"] = fpnet::to_json(solution_of(pc, r.state.d));
  summary["seed"] = cfg.seed;
  summary["config"] = to_json(cfg);

  const auto dir = prepare_out(out_dir);
  write_text_file((dir / "trace.csv").string(), trace_to_csv(r.trace));
  write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  return {r.converged ? kSuccess : kNotConverged, summary};
}

/// Certificates about the reference fixed point; writes verify.json.
inline CommandOutput cmd_verify(const RunConfig& cfg, const std::string& out_dir) {
  ProblemCase pc = build_problem(cfg);
  const System& sys = system_of(pc);
  json report;
  report["problem"] = cfg.problem;
  report["config"] = to_json(cfg);

  Eigen::VectorXd ref;
  try {
    ref = reference_fixed_point(pc, std::max<std::int64_t>(cfg.max_iters, 1));
  } catch (const NotFixedPointError& e) {
    report["error"] = e.what();
    report["pass"] = false;
    write_text_file((prepare_out(out_dir) / "verify.json").string(), report.dump(2) + "\n");
    return {kNotConverged, report};
  }

  const OrthonormalityReport orth = check_orthonormal(sys.interconnection.G, 1e-10);
  report["orthonormality"] = {{"max_deviation", orth.max_deviation}, {"pass", orth.pass}};

  const NeutralityCertificate neutral = certify_neutrality(sys, ref, 100, 1.0, cfg.seed);
  report["neutrality"] = {
      {"samples", neutral.samples}, {"max_deviation", neutral.max_deviation}, {"pass", neutral.pass}};

  bool all_dissipative = true;
  bool dissipative_ok = true;
  json elems = json::array();
  for (std::size_t i = 0; i < sys.elements.size(); ++i) {
    const Element& e = sys.elements[i];
    const Eigen::VectorXd center = ref.segment(e.block.offset, e.block.length);
    const double radius = 1.0 + center.cwiseAbs().maxCoeff();
    const DissipativityReport rep = dissipativity_probe(e, center, 1000, radius, cfg.seed + i + 1);
    const bool expected = e.dissipative();
    all_dissipative = all_dissipative && expected;
    if (expected) dissipative_ok = dissipative_ok && rep.pass;
    elems.push_back({{"kind", to_string(e.kind())},
                     {"offset", e.block.offset},
                     {"length", e.block.length},
                     {"max_ratio", rep.max_ratio},
                     {"pass", rep.pass},
                     {"informational", !expected}});
  }
  report["dissipativity"] = elems;

  const NormReductionCertificate reduction = certify_norm_reduction(sys, ref, 200, 0.1, cfg.seed);
  report["norm_reduction"] = {{"samples", reduction.samples},
                              {"max_ratio", reduction.max_ratio},
                              {"strict", reduction.strict_reductions},
                              {"non_strict", reduction.non_strict},
                              {"pass", reduction.pass},
                              {"weak_pass", reduction.weak_pass},
                              {"informational", !all_dissipative}};

  const bool pass = orth.pass && neutral.pass && dissipative_ok && (reduction.weak_pass || !all_dissipative);
  report["pass"] = pass;
  write_text_file((prepare_out(out_dir) / "verify.json").string(), report.dump(2) + "\n");
  return {pass ? kSuccess : kNotConverged, report};
}

/// Engine solution against the problem's reference solver; writes compare.json.
inline CommandOutput cmd_compare(const RunConfig& cfg, const std::string& out_dir) {
  ProblemCase pc = build_problem(cfg);
  if (std::holds_alternative<EqualizerCase>(pc)) {
    throw ConfigError("problem: sparse_equalizer is nonconvex and has no reference solver to compare against");
  }
  const System& sys = system_of(pc);
  const RunResult r = run(sys, make_bank(cfg), cfg.tol, cfg.max_iters);
  json report;
  report["problem"] = cfg.problem;
  report["converged"] = r.converged;
  report["iterations"] = r.state.iter;
  report["config"] = to_json(cfg);
  const Eigen::VectorXd x = solution_of(pc, r.state.d);
  bool pass = r.converged;

  if (const auto* lc = std::get_if<LassoCase>(&pc)) {
    const OracleSolution o = lc->huber ? oracle_lasso_huber(lc->inst) : oracle_lasso(lc->inst);
    const double err = (x - o.x).cwiseAbs().maxCoeff();
    report["max_abs_error"] = err;
    report["l2_error"] = (x - o.x).norm();
    report["oracle_objective"] = o.objective;
    report["objective"] = lc->inst.objective(x, lc->huber);
    if (lc->huber) {
      pass = pass && err <= 1e-4;
    } else {
      std::vector<Index> s_engine, s_oracle;
      for (Index i = 0; i < x.size(); ++i) {
        if (std::abs(x(i)) > 1e-9) s_engine.push_back(i);
        if (std::abs(o.x(i)) > 1e-9) s_oracle.push_back(i);
      }
      report["support"] = s_engine;
      report["oracle_support"] = s_oracle;
      report["support_match"] = s_engine == s_oracle;
      pass = pass && s_engine == s_oracle && err <= 1e-3;
    }
  } else if (const auto* fc = std::get_if<FirCase>(&pc)) {
    const MinimaxSolution o = oracle_minimax_lp(fc->built.grid, fc->spec.num_taps);
    const Eigen::VectorXd errs = grid_errors(fc->built.grid, x);
    const double ratio = errs.cwiseAbs().maxCoeff() / o.delta;
    const int alt = count_alternations(errs, o.delta, 0.05 * o.delta);
    report["max_grid_error"] = errs.cwiseAbs().maxCoeff();
    report["oracle_delta"] = o.delta;
    report["max_error_ratio"] = ratio;
    report["alternations"] = alt;
    report["alternation_target"] = fc->spec.coefficients() + 2;
    report["coefficient_error"] = (x - o.coefficients).cwiseAbs().maxCoeff();
    pass = pass && ratio <= 1.01 && alt >= fc->spec.coefficients() + 2;
  } else if (const auto* sc = std::get_if<SplitFirCase>(&pc)) {
    const FirGrid grid = design_grid(sc->spec);
    const MinimaxSolution o = oracle_minimax_lp(grid, sc->spec.num_taps);
    const double ratio = max_grid_error(grid, x) / o.delta;
    report["max_grid_error"] = max_grid_error(grid, x);
    report["oracle_delta"] = o.delta;
    report["max_error_ratio"] = ratio;
    report["copy_gap"] = sc->built.copy_gap(r.state.d);
    pass = pass && ratio <= 1.02;
  } else if (const auto* vc = std::get_if<SvmCase>(&pc)) {
    const SvmSolution o = oracle_svm(vc->inst);
    const Eigen::VectorXd mine = svm_predict(vc->inst.features, x);
    const Eigen::VectorXd theirs = svm_predict(vc->inst.features, o.model());
    const Index agree = (mine.array() == theirs.array()).count();
    report["agreement"] = static_cast<double>(agree) / static_cast<double>(mine.size());
    report["training_accuracy"] =
        static_cast<double>((mine.array() == vc->inst.labels.array()).count()) / static_cast<double>(mine.size());
    report["model"] = fpnet::to_json(x);
    report["oracle_model"] = fpnet::to_json(o.model());
    report["model_error"] = (x - o.model()).norm();
    report["consensus_gap"] = vc->built.consensus_gap(r.state.d, vc->inst.graph);
    pass = pass && agree == mine.size();
  }
  report["pass"] = pass;
  write_text_file((prepare_out(out_dir) / "compare.json").string(), report.dump(2) + "\n");
  return {pass ? kSuccess : kNotConverged, report};
}

/// Runs one command, mapping configuration problems to exit code 1.
inline int dispatch(const std::string& command, const RunConfig& cfg, const std::string& out_dir,
                    std::ostream& err = std::cerr) {
  try {
    if (command == "run") return cmd_run(cfg, out_dir).exit_code;
    if (command == "verify") return cmd_verify(cfg, out_dir).exit_code;
    if (command == "compare") return cmd_compare(cfg, out_dir).exit_code;
    err << "error: unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const OracleError& e) {
    err << "error: reference solver failed: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace fpnet::cli
