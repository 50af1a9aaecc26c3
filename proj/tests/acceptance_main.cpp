#include <thread>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  namespace cli = fracac::cli;
  const cli::fs::path out = argc > 1 ? argv[1] : "acceptance_out";
  cli::fs::create_directories(out);
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto results = cli::run_acceptance(workers, out / "determinism", std::cout);
  cli::write_acceptance_csv(results, out / "acceptance.csv");
  int failed = 0;
  for (const auto& r : results) failed += !r.report.pass();
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " of 10 criteria)" : "acceptance: PASS") << "\n";
  return failed ? 1 : 0;
}
