#include <CLI11.hpp>

#include "acceptance.hpp"

using namespace fracac::cli;

namespace {

struct CommonFlags {
  std::string config;
  std::string seed;
  int workers = 1;
  std::string out = ".";
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "key=value config file or a JSON manifest from a previous run");
  sub->add_option("--seed", f.seed, "master seed (u64)");
  sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--set", f.sets, "override a config entry, key=value");
}

fracac::RunConfig assemble(const CommonFlags& f) {
  fracac::RunConfig c = f.config.empty() ? fracac::RunConfig{} : load_config(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got " + kv);
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.seed.empty()) {
    std::stoull(f.seed);
    c.set("seed", f.seed);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching-process Monte Carlo for the fractional Allen-Cahn equation"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, fn] : command_table()) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, flags);
    subs.emplace_back(name, sub);
  }
  std::vector<int> only;
  auto* acc = app.add_subcommand("acceptance", "run the pinned acceptance suite");
  add_common(acc, flags);
  acc->add_option("--only", only, "restrict to these criterion numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    Context ctx;
    ctx.workers = flags.workers;
    ctx.out_dir = flags.out;
    if (acc->parsed()) {
      fs::create_directories(flags.out);
      const auto results = run_acceptance(flags.workers, fs::path(flags.out) / "determinism", std::cout, only);
      write_acceptance_csv(results, fs::path(flags.out) / "acceptance.csv");
      bool ok = true;
      for (const auto& r : results) ok &= r.report.pass();
      return ok ? kOk : kChecksFailed;
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return find_command(name)(assemble(flags), ctx);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration rejected: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
