#include <gtest/gtest.h>

#include <json.hpp>

#include "acceptance.hpp"

using namespace fracac;
using namespace fracac::cli;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fracac_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

Context quiet_ctx(const fs::path& out, int workers = 1) {
  Context c;
  c.out_dir = out.string();
  c.workers = workers;
  c.quiet = true;
  return c;
}

}  // namespace

TEST(Cli, ZeroReplicatesIsUsageError) {
  const auto out = scratch("zero");
  EXPECT_THROW(cmd_estimate(RunConfig{{"n", "0"}}, quiet_ctx(out)), UsageError);
  EXPECT_THROW(cmd_subordinator_stats(RunConfig{{"n", "-5"}}, quiet_ctx(out)), UsageError);
}

TEST(Cli, MissingPhasesRejectedBeforeOutput) {
  const auto out = scratch("phases");
  EXPECT_THROW(cmd_subordinator_stats(RunConfig{{"epsilon", "0.3"}}, quiet_ctx(out)), std::domain_error);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UnknownNamesRejected) {
  EXPECT_THROW(find_command("nope"), UsageError);
  const auto out = scratch("unknown");
  EXPECT_THROW(cmd_estimate(RunConfig{{"initial", "wave"}, {"n", "10"}}, quiet_ctx(out)), UsageError);
  EXPECT_THROW(cmd_coupling_check(RunConfig{{"mode", "other"}}, quiet_ctx(out)), UsageError);
}

TEST(Cli, WrongJumpCutoffIsDetected) {
  const auto out = scratch("cutoff");
  const RunConfig c{{"n", "20000"}, {"n_heat", "100"}, {"trunc_scale", "2"}, {"seed", "4"}};
  EXPECT_EQ(cmd_subordinator_stats(c, quiet_ctx(out)), kChecksFailed);
}

TEST(Cli, ManifestRoundTripReproducesOutputs) {
  const auto out = scratch("manifest");
  const RunConfig c{{"n", "2000"}, {"motion", "sub_full"}, {"scheme", "exp_marked"}, {"epsilon", "0.2"},
                    {"t_values", "0.04"}, {"x_values", "-0.2,0.2"}, {"seed", "17"}};
  ASSERT_EQ(cmd_estimate(c, quiet_ctx(out / "a")), kOk);
  const auto manifest_path = out / "a" / "estimate.manifest.json";
  std::ifstream is(manifest_path);
  const auto j = nlohmann::json::parse(is);
  EXPECT_EQ(j["command"], "estimate");
  EXPECT_EQ(j["seed"], "17");
  EXPECT_EQ(j["status"], "done");
  EXPECT_FALSE(j["partial"].get<bool>());
  EXPECT_EQ(j["config"]["scheme"], "exp_marked");
  EXPECT_EQ(j["config"]["n"], "2000");
  EXPECT_TRUE(j["config"].contains("resolution_ratio"));

  const auto reloaded = load_config(manifest_path.string());
  ASSERT_EQ(cmd_estimate(reloaded, quiet_ctx(out / "b", 4)), kOk);
  EXPECT_EQ(read_file(out / "a" / "estimate.csv"), read_file(out / "b" / "estimate.csv"));
  EXPECT_EQ(RunConfig::load((out / "a" / "estimate.cfg").string()), reloaded);
}

TEST(Cli, CsvHeaderCarriesProvenance) {
  const auto out = scratch("header");
  ASSERT_EQ(cmd_assumption_report(RunConfig{}, quiet_ctx(out)), kOk);
  std::ifstream is(out / "assumptions.csv");
  std::string first, second;
  std::getline(is, first);
  std::getline(is, second);
  EXPECT_EQ(first.rfind("# tool=fracac version=", 0), 0u);
  EXPECT_NE(first.find("command=assumption-report"), std::string::npos);
  EXPECT_NE(first.find("config_hash="), std::string::npos);
  EXPECT_EQ(second, "epsilon,I,width1,width2,width3,marking,tails,F");
}

TEST(Cli, BudgetFailureMarksPartialOutput) {
  const auto out = scratch("partial");
  const RunConfig c{{"n", "200"}, {"node_budget", "10"}, {"epsilon", "0.1"}, {"t_values", "0.1"},
                    {"motion", "sub_truncated"}};
  EXPECT_THROW(cmd_estimate(c, quiet_ctx(out)), BudgetFailure);
  std::ifstream is(out / "estimate.manifest.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_TRUE(j["partial"].get<bool>());
  EXPECT_EQ(j["status"], "error");
}
