#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace fracac::cli {

struct CriterionResult {
  int id;
  std::string title;
  Report report;
  double seconds = 0;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// Runs every command with 1 worker, then re-runs it from the written manifest
// with 4 and 8 workers and compares all data files byte for byte.
inline Report determinism_check(const fs::path& scratch) {
  Report r;
  const std::vector<std::pair<std::string, RunConfig>> runs = {
      {"subordinator-stats", RunConfig{{"n", "5000"}, {"n_heat", "1000"}, {"seed", "11"}}},
      {"vote-math", RunConfig{{"mirror_trees", "20"}}},
      {"estimate", RunConfig{{"n", "4000"}, {"motion", "sub_truncated"}, {"scheme", "marked"}, {"initial", "phat"},
                             {"alpha", "1.5"}, {"epsilon", "0.2"}, {"t_values", "0.04,0.08"}, {"x_values", "-0.3,0,0.3"}}},
      {"coupling-check", RunConfig{{"n", "2000"}, {"x_values", "0.3,-1"}, {"seed", "5"}}},
      {"oracle-run", RunConfig{{"N", "1024"}, {"L", "8"}, {"times", "0.045"}}},
      {"mcf-track", RunConfig{{"N", "64"}, {"epsilon", "0.1"}, {"times", "0.05,0.1"}}},
      {"assumption-report", RunConfig{}},
  };
  for (const auto& [name, cfg] : runs) {
    const auto& fn = find_command(name);
    const fs::path base = scratch / name;
    std::vector<std::string> listing;
    Context c1;
    c1.quiet = true;
    c1.out_dir = (base / "w1").string();
    fs::remove_all(base);
    fn(cfg, c1);
    const auto manifest = load_config((fs::path(c1.out_dir) / (name + ".manifest.json")).string());
    bool same = true;
    std::size_t files = 0;
    for (int w : {4, 8}) {
      Context cw = c1;
      cw.workers = w;
      cw.out_dir = (base / ("w" + std::to_string(w))).string();
      fn(manifest, cw);
      for (const auto& entry : fs::directory_iterator(c1.out_dir)) {
        const auto fname = entry.path().filename().string();
        if (fname.ends_with(".manifest.json")) continue;
        ++files;
        same &= read_file(entry.path()) == read_file(fs::path(cw.out_dir) / fname);
      }
    }
    r.add(name, static_cast<double>(files), 0, same && files > 0, "files compared across 1/4/8 workers");
  }
  return r;
}

// The pinned configurations of the acceptance suite.
inline std::vector<CriterionResult> run_acceptance(int workers, const fs::path& scratch, std::ostream& out,
                                                   const std::vector<int>& only = {}) {
  std::vector<CriterionResult> results;
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  auto timed = [&](int id, const std::string& title, const std::function<Report()>& fn) {
    if (!want(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult cr{id, title, {}, 0};
    try {
      cr.report = fn();
    } catch (const std::exception& ex) {
      cr.report.add("error", 0, 0, false, ex.what());
    }
    cr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& r = cr.report;
    out << "criterion " << id << " (" << title << "): " << (r.pass() ? "PASS" : "FAIL") << "  ["
        << r.checks.size() - r.failures() << "/" << r.checks.size() << " checks, " << fmt(cr.seconds) << " s]\n";
    for (const auto& c : r.checks)
      if (!c.pass) out << "    failed " << c.name << ": value=" << c.value << " bound=" << c.bound << " " << c.detail << "\n";
    for (const auto& [k, v] : r.fitted) out << "    fitted " << k << " = " << fmt(v) << "\n";
    out.flush();
    results.push_back(std::move(cr));
  };

  timed(1, "exact algebra", [] {
    RunConfig c{{"grid", "1000"}, {"tol", "1e-12"}, {"mirror_trees", "100"}, {"seed", "1"}};
    return vote_math(c);
  });
  timed(2, "subordinator identities", [&] {
    RunConfig c{{"alpha", "1.5"}, {"epsilon", "0.1"}, {"preset", "log"}, {"n", "100000"}, {"seed", "2"}};
    return subordinator_stats(c, workers);
  });
  timed(3, "heat kernel Lipschitz bound", [] { return heat_kernel_lipschitz(10000, 3); });
  timed(4, "voting iterate convergence", [] { return iterate_convergence(RunConfig{{"m_values", "2,3,4"}}); });
  timed(5, "duality against the spectral oracle", [&] {
    RunConfig c{{"alphas", "1.5,2"}, {"epsilon", "0.3"}, {"preset", "log"}, {"n", "100000"}, {"seed", "5"}};
    return duality(c, workers);
  });
  timed(6, "coupled voting systems", [&] {
    RunConfig c{{"alpha", "1.5"}, {"epsilon", "0.1"}, {"preset", "log"}, {"a1", "1"}, {"k", "2"},
                {"n", "100000"}, {"seed", "6"}, {"x_values", "0,0.3,-0.3,1,-1"}};
    return coupling_pairs(c, workers);
  });
  timed(7, "1D interface of the marked scheme", [&] {
    RunConfig c{{"alpha", "1.5"}, {"epsilon", "0.25"}, {"preset", "power_example"}, {"t_over_eps2", "4"},
                {"c1", "2"}, {"k", "1"}, {"n", "10000"}, {"seed", "7"}};
    return interface_1d(c, workers);
  });
  timed(8, "shifted processes", [&] {
    Report r;
    RunConfig z{{"alpha", "1.5"}, {"epsilon", "0.1"}, {"preset", "log"}, {"r0", "2"}, {"t", "0.25"},
                {"k", "1"}, {"n", "100000"}, {"seed", "8"}};
    r.append(z_identities(z), "identities:");
    r.append(z_coupling(z, workers), "coupling:");
    RunConfig g{{"alpha", "1.5"}, {"preset", "log"}, {"eps_grid", "0.3,0.2,0.15"}, {"r0", "2"}, {"beta", "0.5"},
                {"k", "1"}, {"n", "40000"}, {"sign", "-1"}, {"t_over_eps2", "2"}, {"seed", "8"}};
    r.append(z_gronwall(g, workers), "gronwall:");
    return r;
  });
  timed(9, "circle interface under the oracle", [] {
    RunConfig c{{"alphas", "1.7,2"}, {"epsilon", "0.05"}, {"preset", "log"}, {"N", "256"}, {"L", "2"}, {"r0", "1"},
                {"dt_over_eps2", "0.1"}, {"c_max", "5"}};
    return mcf_track(c);
  });
  timed(10, "determinism across workers", [&] { return determinism_check(scratch); });
  return results;
}

inline void write_acceptance_csv(const std::vector<CriterionResult>& results, const fs::path& path) {
  std::ofstream os(path);
  os.precision(17);
  os << "# tool=fracac version=" << kToolVersion << " command=acceptance\n";
  os << "criterion,check,value,bound,pass,detail\n";
  for (const auto& cr : results) {
    for (const auto& c : cr.report.checks)
      os << cr.id << ',' << c.name << ',' << c.value << ',' << c.bound << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
    for (const auto& [k, v] : cr.report.fitted) os << cr.id << ",fitted:" << k << ',' << v << ",,,\"\"\n";
  }
}

}  // namespace fracac::cli
