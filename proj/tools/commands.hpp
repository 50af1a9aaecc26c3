#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"
#include "fracac/field.hpp"

namespace fracac::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = FRACAC_VERSION;

enum ExitCode { kOk = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Context {
  std::string out_dir = ".";
  int workers = 1;
  std::ostream* log = &std::cerr;
  bool quiet = false;
};

// Reads either a plain key=value config or a JSON manifest written by a previous run.
inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    RunConfig c;
    for (const auto& [k, v] : j.at("config").items()) c.set(k, v.get<std::string>());
    return c;
  }
  return RunConfig::parse(text);
}

// Output files of one command run. CSV files open with a comment block that
// carries the manifest fields which do not depend on the worker count.
class RunOutputs {
 public:
  RunOutputs(std::string command, const RunConfig& cfg, const Context& ctx)
      : command_(std::move(command)), cfg_(cfg), ctx_(ctx) {
    fs::create_directories(ctx.out_dir);
  }

  std::ofstream csv(const std::string& name, const std::string& header) {
    const auto path = fs::path(ctx_.out_dir) / (name + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# tool=fracac version=" << kToolVersion << " command=" << command_ << " config_hash=" << cfg_.hash()
       << " seed=" << cfg_.str("seed", "0") << "\n";
    os << header << "\n";
    os.precision(17);
    files_.push_back(path.filename().string());
    return os;
  }

  std::string binary_path(const std::string& name) {
    files_.push_back(name);
    return (fs::path(ctx_.out_dir) / name).string();
  }

  void finish(const std::string& status, bool partial, const std::string& error = "") const {
    nlohmann::json j;
    j["tool"] = "fracac";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["config_hash"] = cfg_.hash();
    j["seed"] = cfg_.str("seed", "0");
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : cfg_.entries())
      if (k != "workers" && k != "out") j["config"][k] = v;
    j["workers"] = ctx_.workers;
    j["outputs"] = files_;
    j["status"] = status;
    j["partial"] = partial;
    if (!error.empty()) j["error"] = error;
    std::ofstream os(fs::path(ctx_.out_dir) / (command_ + ".manifest.json"));
    os << j.dump(2) << "\n";
    std::ofstream cfg(fs::path(ctx_.out_dir) / (command_ + ".cfg"));
    cfg << cfg_.render();
  }

 private:
  std::string command_;
  RunConfig cfg_;
  Context ctx_;
  std::vector<std::string> files_;
};

inline void write_checks(RunOutputs& out, const std::string& name, const Report& r) {
  auto os = out.csv(name, "check,value,bound,pass,detail");
  for (const auto& c : r.checks) os << c.name << ',' << c.value << ',' << c.bound << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
  for (const auto& [k, v] : r.fitted) os << "fitted:" << k << ',' << v << ",,,\"\"\n";
}

inline void log_report(const Context& ctx, const Report& r) {
  if (ctx.quiet) return;
  for (const auto& c : r.checks)
    *ctx.log << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  value=" << c.value << " bound=" << c.bound
             << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  for (const auto& [k, v] : r.fitted) *ctx.log << "  fitted " << k << " = " << v << "\n";
}

// ---------------------------------------------------------------------------
// Commands. Each fills its defaults into the config first, so the manifest
// records every parameter that influenced the outputs.

inline void set_model_defaults(RunConfig& c, double alpha = 1.5, double eps = 0.1, const char* preset = "log") {
  c.set_default("alpha", RunConfig::fmt(alpha));
  c.set_default("epsilon", RunConfig::fmt(eps));
  c.set_default("preset", preset);
  c.set_default("seed", "1");
}

inline int cmd_subordinator_stats(RunConfig c, const Context& ctx) {
  set_model_defaults(c);
  c.set_default("n", "100000");
  c.set_default("n_heat", "10000");
  c.set_default("resolution_ratio", RunConfig::fmt(kDefaultResolutionRatio));
  c.set_default("trunc_scale", "1");
  if (c.integer("n") <= 0) throw UsageError("n must be positive");
  params_from(c).phases();
  RunOutputs out("subordinator-stats", c, ctx);
  Report r;
  r.append(subordinator_stats(c, ctx.workers));
  r.append(heat_kernel_lipschitz(c.integer("n_heat"), c.u64("seed", 1)), "heat_kernel_");
  write_checks(out, "subordinator_stats", r);
  log_report(ctx, r);
  out.finish(r.pass() ? "pass" : "fail", false);
  return r.pass() ? kOk : kChecksFailed;
}

inline int cmd_vote_math(RunConfig c, const Context& ctx) {
  c.set_default("seed", "1");
  c.set_default("grid", "1000");
  c.set_default("tol", "1e-12");
  c.set_default("b_values", "0,0.05,0.1,0.2,0.3");
  c.set_default("m_values", "2,3,4");
  c.set_default("mirror_trees", "100");
  RunOutputs out("vote-math", c, ctx);
  Report r;
  r.append(vote_math(c));
  r.append(iterate_convergence(c), "iterate_");
  write_checks(out, "vote_math", r);
  log_report(ctx, r);
  out.finish(r.pass() ? "pass" : "fail", false);
  return r.pass() ? kOk : kChecksFailed;
}

inline InitialCondition parse_initial(const std::string& s, const ModelParams& p) {
  if (s == "step") return InitialCondition::step();
  if (s == "phat") return InitialCondition::phat(p);
  if (s.rfind("const:", 0) == 0) return InitialCondition::constant(std::stod(s.substr(6)));
  if (s.rfind("sphere:", 0) == 0) return InitialCondition::outside_sphere(std::stod(s.substr(7)));
  throw UsageError("unknown initial condition: " + s);
}

inline int cmd_estimate(RunConfig c, const Context& ctx) {
  set_model_defaults(c, 1.5, 0.3);
  c.set_default("scheme", "majority");
  c.set_default("motion", "stable1d");
  c.set_default("initial", "step");
  c.set_default("n", "10000");
  c.set_default("t_values", "0.09");
  c.set_default("x_values", "-1,-0.5,0,0.5,1");
  c.set_default("resolution_ratio", RunConfig::fmt(kDefaultResolutionRatio));
  c.set_default("node_budget", std::to_string(kDefaultNodeBudget));
  if (c.integer("n") <= 0) throw UsageError("n must be positive");
  const auto p = params_from(c);
  const auto kind = parse_motion(c.str("motion"));
  MotionSpec motion;
  const double ratio = c.real("resolution_ratio");
  switch (kind) {
    case MotionKind::Stable1D: motion = MotionSpec::stable(1); break;
    case MotionKind::StableD: motion = MotionSpec::stable(static_cast<int>(c.integer("dim", 2))); break;
    case MotionKind::SubordinatedTruncated: motion = MotionSpec::truncated(static_cast<int>(c.integer("dim", 1)), ratio); break;
    case MotionKind::SubordinatedFull: motion = MotionSpec::full(static_cast<int>(c.integer("dim", 1)), ratio); break;
    case MotionKind::ZPlus:
    case MotionKind::ZMinus:
      motion = MotionSpec::z(kind == MotionKind::ZPlus ? 1 : -1, SphereFlow(c.real("r0", 2.0), 2), c.real("shift_l", 1.0),
                             c.real("beta", 0.5), ratio);
      break;
  }
  const VoteScheme scheme{parse_scheme(c.str("scheme")), parse_initial(c.str("initial"), p)};
  EstimatorOptions opt;
  opt.workers = ctx.workers;
  opt.lazy.node_budget = c.integer("node_budget");
  RunOutputs out("estimate", c, ctx);
  auto os = out.csv("estimate", "x,t,p_hat,stderr,lo,hi,n,budget_exhausted");
  try {
    for (double t : c.reals("t_values")) {
      if (exceeds_feasible_time(p, t, opt) && !ctx.quiet)
        *ctx.log << "warning: t / eps^2 = " << t * p.branch_rate << " exceeds " << opt.warn_ratio << "\n";
      for (double x : c.reals("x_values")) {
        Point X(motion.dim);
        X[0] = x;
        const auto e = estimate_u(p, X, t, motion, scheme, c.integer("n"), c.u64("seed", 1), opt);
        os << x << ',' << t << ',' << e.p_hat << ',' << e.std_error << ',' << e.lo << ',' << e.hi << ',' << e.n << ','
           << e.budget_exhausted_count << "\n";
      }
    }
  } catch (const std::exception& ex) {
    os.flush();
    out.finish("error", true, ex.what());
    throw;
  }
  out.finish("done", false);
  return kOk;
}

inline int cmd_coupling_check(RunConfig c, const Context& ctx) {
  c.set_default("mode", "pairs");
  const std::string mode = c.str("mode");
  Report r;
  if (mode == "pairs") {
    set_model_defaults(c);
    c.set_default("a1", "1");
    c.set_default("k", "2");
    c.set_default("n", "100000");
    c.set_default("x_values", "0,0.3,-0.3,1,-1");
    c.set_default("resolution_ratio", RunConfig::fmt(kDefaultResolutionRatio));
    if (c.integer("n") <= 0) throw UsageError("n must be positive");
    RunOutputs out("coupling-check", c, ctx);
    std::vector<PairRow> rows;
    r = coupling_pairs(c, ctx.workers, &rows);
    auto os = out.csv("coupling_pairs", "x,relation,value,se,pass");
    for (const auto& row : rows) os << row.x << ",\"" << row.relation << "\"," << row.value << ',' << row.se << ',' << row.pass << "\n";
    write_checks(out, "coupling_checks", r);
    out.finish(r.pass() ? "pass" : "fail", false);
  } else if (mode == "z") {
    set_model_defaults(c);
    c.set_default("r0", "2");
    c.set_default("t", "0.25");
    c.set_default("k", "1");
    c.set_default("n", "100000");
    c.set_default("resolution_ratio", RunConfig::fmt(kDefaultResolutionRatio));
    RunOutputs out("coupling-check", c, ctx);
    r.append(z_identities(c));
    r.append(z_coupling(c, ctx.workers));
    write_checks(out, "coupling_checks", r);
    out.finish(r.pass() ? "pass" : "fail", false);
  } else if (mode == "gronwall") {
    c.set_default("alpha", "1.5");
    c.set_default("preset", "log");
    c.set_default("seed", "1");
    c.set_default("eps_grid", "0.3,0.2,0.15");
    c.set_default("r0", "2");
    c.set_default("beta", "0.5");
    c.set_default("k", "1");
    c.set_default("n", "40000");
    c.set_default("sign", "-1");
    c.set_default("t_over_eps2", "2");
    RunOutputs out("coupling-check", c, ctx);
    std::vector<GapRow> rows;
    r = z_gronwall(c, ctx.workers, &rows);
    auto os = out.csv("gronwall_gap", "epsilon,gap,se,F,p_z,p_w");
    for (const auto& g : rows)
      os << g.epsilon << ',' << g.gap.gap << ',' << g.gap.se << ',' << g.gap.F << ',' << g.gap.pair.first.p_hat << ','
         << g.gap.pair.second.p_hat << "\n";
    write_checks(out, "coupling_checks", r);
    out.finish(r.pass() ? "pass" : "fail", false);
  } else {
    throw UsageError("coupling-check mode must be pairs, z or gronwall");
  }
  log_report(ctx, r);
  return r.pass() ? kOk : kChecksFailed;
}

inline int cmd_oracle_run(RunConfig c, const Context& ctx) {
  set_model_defaults(c, 1.5, 0.3);
  c.set_default("dim", "1");
  c.set_default("N", "4096");
  c.set_default("L", "16");
  c.set_default("dt_over_eps2", "0.01");
  c.set_default("smooth_cells", "2");
  c.set_default("initial", c.str("dim") == "2" ? "disk" : "step");
  c.set_default("r0", "1");
  c.set_default("low", "0");
  c.set_default("high", "1");
  c.set_default("times", "0.045,0.09,0.18");
  const auto p = params_from(c);
  const int dim = static_cast<int>(c.integer("dim")), N = static_cast<int>(c.integer("N"));
  const double L = c.real("L"), w = c.real("smooth_cells"), lo = c.real("low"), hi = c.real("high");
  GridField init;
  if (c.str("initial") == "step") {
    if (dim != 1) throw UsageError("step initial condition needs dim = 1");
    init = smoothed_step_1d(N, L, lo, hi, w);
  } else if (c.str("initial") == "disk") {
    if (dim != 2) throw UsageError("disk initial condition needs dim = 2");
    init = smoothed_disk_2d(N, L, c.real("r0"), lo, hi, w);
  } else {
    throw UsageError("initial must be step or disk");
  }
  const auto times = c.reals("times");
  RunOutputs out("oracle-run", c, ctx);
  OracleStats st;
  const auto snaps = solve(p, init, times, c.real("dt_over_eps2") * p.epsilon * p.epsilon, &st);
  std::string header = "x";
  for (double t : times) header += ",u_t=" + RunConfig::fmt(t);
  auto os = out.csv("oracle_cut", header);
  for (int i = 0; i < N; ++i) {
    os << init.coord(i);
    for (const auto& s : snaps) os << ',' << (dim == 1 ? s.values[i] : s.at(i, N / 2));
    os << "\n";
  }
  for (std::size_t k = 0; k < snaps.size(); ++k) write_snapshot(snaps[k], out.binary_path("oracle_" + std::to_string(k) + ".bin"));
  Report r;
  r.add("overshoot_before_clip", st.max_overshoot, 1e-9, st.max_overshoot <= 1e-9, std::to_string(st.steps) + " steps");
  write_checks(out, "oracle_checks", r);
  log_report(ctx, r);
  out.finish(r.pass() ? "pass" : "fail", false);
  return r.pass() ? kOk : kChecksFailed;
}

inline int cmd_mcf_track(RunConfig c, const Context& ctx) {
  c.set_default("alphas", "1.7,2");
  c.set_default("epsilon", "0.05");
  c.set_default("preset", "log");
  c.set_default("N", "256");
  c.set_default("L", "2");
  c.set_default("r0", "1");
  c.set_default("dt_over_eps2", "0.1");
  c.set_default("smooth_cells", "2");
  c.set_default("c_max", "5");
  c.set_default("times", RunConfig::join(linspace(0.05, 0.3, 11)));
  c.set_default("seed", "0");
  RunOutputs out("mcf-track", c, ctx);
  std::vector<RadiusRow> rows;
  const auto r = mcf_track(c, &rows);
  auto os = out.csv("mcf_radius", "alpha,t,radius,exact,deviation");
  for (const auto& row : rows) os << row.alpha << ',' << row.t << ',' << row.radius << ',' << row.exact << ',' << row.radius - row.exact << "\n";
  write_checks(out, "mcf_checks", r);
  log_report(ctx, r);
  out.finish(r.pass() ? "pass" : "fail", false);
  return r.pass() ? kOk : kChecksFailed;
}

inline int cmd_assumption_report(RunConfig c, const Context& ctx) {
  c.set_default("alpha", "1.5");
  c.set_default("preset", "log");
  c.set_default("eps_grid", "0.01,0.001,0.0001,1e-05,1e-06");
  c.set_default("seed", "0");
  const double alpha = c.real("alpha");
  const auto preset = ScalingPreset::parse(c.str("preset"));
  const auto grid = c.reals("eps_grid");
  const auto rep = assumption_report(preset, alpha, grid);
  RunOutputs out("assumption-report", c, ctx);
  auto os = out.csv("assumptions", "epsilon,I,width1,width2,width3,marking,tails,F");
  for (const auto& row : rep.rows) {
    os << row.epsilon << ',' << row.I << ',' << row.width[0] << ',' << row.width[1] << ',' << row.width[2] << ','
       << row.marking << ',' << row.tails << ',';
    if (alpha < 2) os << F_eps(ModelParams(alpha, row.epsilon, preset));
    os << "\n";
  }
  Report r;
  for (int k = 0; k < 3; ++k) r.add("width_k=" + std::to_string(k + 1) + "_decreasing", rep.width_decreasing[k], 1, rep.width_decreasing[k]);
  r.add("marking_decreasing", rep.marking_decreasing, 1, rep.marking_decreasing);
  r.add("tails_decreasing", rep.tails_decreasing, 1, rep.tails_decreasing);
  write_checks(out, "assumption_checks", r);
  log_report(ctx, r);
  out.finish(r.pass() ? "pass" : "fail", false);
  return r.pass() ? kOk : kChecksFailed;
}

using CommandFn = std::function<int(RunConfig, const Context&)>;

inline const std::vector<std::pair<std::string, CommandFn>>& command_table() {
  static const std::vector<std::pair<std::string, CommandFn>> t = {
      {"subordinator-stats", cmd_subordinator_stats}, {"vote-math", cmd_vote_math},
      {"estimate", cmd_estimate},                     {"coupling-check", cmd_coupling_check},
      {"oracle-run", cmd_oracle_run},                 {"mcf-track", cmd_mcf_track},
      {"assumption-report", cmd_assumption_report},
  };
  return t;
}

inline const CommandFn& find_command(const std::string& name) {
  for (const auto& [n, f] : command_table())
    if (n == name) return f;
  throw UsageError("unknown command " + name);
}

}  // namespace fracac::cli
