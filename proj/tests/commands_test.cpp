#include "fomas/commands.hpp"

#include <filesystem>

#include <gtest/gtest.h>

namespace fomas {
namespace commands {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

CommandOptions NoFiles() {
  CommandOptions o;
  o.write_files = false;
  return o;
}

std::string TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fomas_commands_" + name);
  fs::remove_all(p);
  return p.string();
}

GTEST_TEST(CommandsTest, SynthWritesControllerAndReport) {
  CommandOptions o;
  o.out_dir = TempDir("synth");
  const RunReport r = CmdSynth(scenario::Load("pmsm"), o);
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_EQ(r.report["synthesis"]["status"], "strictly-feasible");
  EXPECT_EQ(r.report["certificates"]["argument"]["verdict"], "stable");
  EXPECT_EQ(r.report["certificates"]["lemma1"]["status"], "strictly-feasible");
  const auto files = r.report["files"].get<std::vector<std::string>>();
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) {
    EXPECT_TRUE(fs::exists(f)) << f;
    EXPECT_GT(fs::file_size(f), 0u) << f;
  }
  fs::remove_all(o.out_dir);
}

GTEST_TEST(CommandsTest, SynthNumericCorollary1Order2) {
  CommandOptions o = NoFiles();
  o.n_c = 2;
  o.method = synthesis::Method::kCorollary1;
  const RunReport r = CmdSynth(ApplyOverrides(scenario::Load("numeric"), o), o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["synthesis"]["certified"].get<bool>());
  EXPECT_TRUE(r.report["certificates"]["agree"].get<bool>());
}

GTEST_TEST(CommandsTest, HugeLipschitzConstantExitsInfeasible) {
  scenario::Scenario s = scenario::Load("pmsm");
  s.system.nonlinearity->xi1 = 1e6;
  const RunReport r = CmdSynth(s, NoFiles());
  EXPECT_EQ(r.exit_code, kInfeasible);
  EXPECT_EQ(r.report["synthesis"]["status"], "infeasible");
  EXPECT_TRUE(r.report["synthesis"].contains("margin"));
}

GTEST_TEST(CommandsTest, SynthNeedsSynthesizeSource) {
  EXPECT_THROW(CmdSynth(scenario::Load("pmsm-fixed-0"), NoFiles()), scenario::ScenarioError);
}

GTEST_TEST(CommandsTest, OverrideErrors) {
  CommandOptions o;
  o.n_c = 2;
  EXPECT_THROW(ApplyOverrides(scenario::Load("pmsm-fixed-0"), o), scenario::ScenarioError);
  CommandOptions m;
  m.method = synthesis::Method::kTheorem2;
  EXPECT_THROW(ApplyOverrides(scenario::Load("pmsm-fixed-1"), m), scenario::ScenarioError);
  // Corollary 1 is only defined without a nonlinearity.
  CommandOptions c;
  c.method = synthesis::Method::kCorollary1;
  const scenario::Scenario s = ApplyOverrides(scenario::Load("pmsm"), c);
  EXPECT_THROW(CmdSynth(s, NoFiles()), std::invalid_argument);
}

GTEST_TEST(CommandsTest, VerifyPublishedAndDestabilized) {
  const RunReport ok = CmdVerify(scenario::Load("pmsm-fixed-0"), NoFiles());
  EXPECT_EQ(ok.exit_code, kOk);
  EXPECT_TRUE(ok.report["stable"].get<bool>());

  scenario::Scenario bad = scenario::Load("pmsm-fixed-0");
  bad.fixed->D_c[0](0, 0) += 1000.0;
  const RunReport r = CmdVerify(bad, NoFiles());
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_FALSE(r.report["stable"].get<bool>());
  EXPECT_EQ(r.report["certificates"]["argument"]["verdict"], "unstable");
  EXPECT_NE(r.report["certificates"]["lemma1"]["status"], "strictly-feasible");
}

GTEST_TEST(CommandsTest, VerifyNumericCertificatesAgree) {
  const RunReport r = CmdVerify(scenario::Load("numeric"), NoFiles());
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["certificates"]["agree"].get<bool>());
}

GTEST_TEST(CommandsTest, SimulatePublishedStaticGains) {
  CommandOptions o;
  o.out_dir = TempDir("simulate");
  const RunReport r = CmdSimulate(scenario::Load("pmsm-fixed-0"), o);
  ASSERT_EQ(r.exit_code, kOk);
  EXPECT_EQ(r.report["simulation"]["verdict"], "pass");
  const auto files = r.report["files"].get<std::vector<std::string>>();
  EXPECT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_GT(fs::file_size(f), 0u) << f;
  fs::remove_all(o.out_dir);
}

GTEST_TEST(CommandsTest, ZeroControllerOnUnstablePlantFailsVerdictNotCommand) {
  scenario::Scenario s = scenario::FromJson(json::parse(R"({
    "name": "unstable",
    "system": {"A": [[0.5]], "B": [[[1.0]], [[1.0]]], "C": [[1.0]], "q": 0.6,
               "adjacency": [[0, 1], [1, 0]], "nonlinearity": {"name": "none", "xi1": 0}},
    "controller": {"fixed": {"n_c": 0, "D_c": [[[0.0]], [[0.0]]]}},
    "sim": {"t_end": 3.0, "dt": 0.01, "x0": [1.0, -1.0]}
  })"));
  const RunReport r = CmdSimulate(s, NoFiles());
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_EQ(r.report["simulation"]["verdict"], "fail");
}

GTEST_TEST(CommandsTest, DivergenceExitCode) {
  scenario::Scenario s = scenario::Load("pmsm-fixed-0");
  for (auto& d : s.fixed->D_c) d(0, 0) = 1e5;
  const RunReport r = CmdSimulate(s, NoFiles());
  EXPECT_EQ(r.exit_code, kDivergence);
  EXPECT_TRUE(r.report["simulation"]["diverged"].get<bool>());
  EXPECT_GT(r.report["simulation"]["step"].get<int>(), 0);
}

GTEST_TEST(CommandsTest, SweepZeroDraws) {
  CommandOptions o = NoFiles();
  o.draws = 0;
  const RunReport r = CmdSweep(scenario::Load("pmsm"), o);
  EXPECT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["results"].empty());
}

GTEST_TEST(CommandsTest, SweepIsDeterministic) {
  CommandOptions o = NoFiles();
  o.draws = 3;
  o.seed = 99;
  scenario::Scenario s = scenario::Load("pmsm-fixed-1");
  s.sim.t_end = 1.0;
  const RunReport a = CmdSweep(s, o);
  const RunReport b = CmdSweep(s, o);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  ASSERT_EQ(a.report["results"].size(), 3u);
  o.seed = 100;
  const RunReport c = CmdSweep(s, o);
  EXPECT_NE(a.report["results"].dump(), c.report["results"].dump());
}

GTEST_TEST(CommandsTest, SweepNeedsSomethingToSample) {
  scenario::Scenario s = scenario::Load("numeric");
  s.system.uncertainty.reset();
  EXPECT_THROW(CmdSweep(s, NoFiles()), scenario::ScenarioError);
}

GTEST_TEST(CommandsTest, SampledDeltasAreAdmissible) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Matrix J = k % 2 ? Matrix::Identity(1, 1) : linalg::FromRows({{2, 1}, {-1, 1}});
    EXPECT_TRUE(plant::InAdmissibleSet(SampleAdmissibleDelta(J, rng), J));
  }
}

}  // namespace
}  // namespace commands
}  // namespace fomas
