#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "tempering/hardness.hpp"
#include "tempering/io.hpp"

using namespace tempering;

namespace {

struct LabRun {
  int status = -1;
  std::string out;
};

LabRun lab(const std::string& args) {
  const std::string cmd = std::string(TEMPERING_LAB_BIN) + " " + args + " 2>/tmp/tempering_lab_stderr";
  LabRun run;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) run.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

std::string data(const std::string& name) { return std::string(TEMPERING_TEST_DATA) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, GapOfTwoStateFixture) {
  const LabRun run = lab("gap --input " + data("two_state.json"));
  ASSERT_EQ(run.status, 0);
  EXPECT_NEAR(json::parse(run.out).at("gap").get<double>(), 0.4, 1e-14);
}

TEST(Cli, NonReversibleKernelIsInvalid) {
  const LabRun run = lab("gap --input " + data("cycle.json"));
  EXPECT_EQ(run.status, 2);
  EXPECT_NE(slurp("/tmp/tempering_lab_stderr").find("detailed-balance residual"), std::string::npos);
}

TEST(Cli, ConstrainedGapMatchesLibrary) {
  const LabRun run = lab("gap --kernel constrained --L 3");
  ASSERT_EQ(run.status, 0);
  const double expect = spectral_gap(constrained_projected_chain(build_hard_instance(3)).kernel).gap;
  EXPECT_EQ(json::parse(run.out).at("gap").dump(), json(expect).dump());
}

TEST(Cli, GapCsv) {
  const LabRun run = lab("gap --input " + data("two_state.json") + " --format csv");
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(run.out.rfind("kernel,states,gap", 0), 0u);
}

TEST(Cli, BudgetExceeded) {
  EXPECT_EQ(lab("gap --m 3 --L 6 --budget-states 1000").status, 3);
}

TEST(Cli, VerifyLowerRandomFamily) {
  const LabRun run = lab("verify-lower --m 2 --L 2 --seed 1");
  ASSERT_EQ(run.status, 0);
  EXPECT_TRUE(json::parse(run.out).at("passed").get<bool>());
}

TEST(Cli, VerifyLowerUniformFamily) {
  const LabRun run = lab("verify-lower --input " + data("uniform_family.json"));
  ASSERT_EQ(run.status, 0);
  const json doc = json::parse(run.out);
  EXPECT_TRUE(std::isfinite(doc.at("congestion").at("c").get<double>()));
}

TEST(Cli, MalformedJsonIsInvalid) {
  EXPECT_EQ(lab("verify-lower --input " + data("malformed.json")).status, 2);
  EXPECT_EQ(lab("verify-lower --input " + data("missing.json")).status, 2);
}

TEST(Cli, VerifyUpper) {
  const LabRun run = lab("verify-upper --L 3");
  ASSERT_EQ(run.status, 0);
  const json doc = json::parse(run.out);
  EXPECT_TRUE(doc.at("certificate").at("passed").get<bool>());
  EXPECT_EQ(lab("verify-upper --L 0").status, 2);
}

TEST(Cli, BadFlagsAreInvalid) {
  EXPECT_EQ(lab("gap --tol 2").status, 2);
  EXPECT_EQ(lab("frobnicate").status, 2);
  EXPECT_EQ(lab("--help").status, 0);
}

TEST(Cli, SimulateIsDeterministic) {
  const std::string a = ::testing::TempDir() + "sim_a";
  const std::string b = ::testing::TempDir() + "sim_b";
  const std::string args = "simulate --input " + data("bimodal.json") + " --N 2000 --seed 5 --out ";
  ASSERT_EQ(lab(args + a).status, 0);
  ASSERT_EQ(lab(args + b).status, 0);
  EXPECT_EQ(slurp(a + ".csv"), slurp(b + ".csv"));
  EXPECT_EQ(slurp(a + ".json"), slurp(b + ".json"));
  EXPECT_EQ(slurp(a + ".csv").rfind("iteration,level,atom", 0), 0u);
}

TEST(Cli, SimulateUniformAcceptsEverySwap) {
  const LabRun run = lab("simulate --input " + data("uniform_family.json") + " --N 500");
  ASSERT_EQ(run.status, 0);
  for (const auto& rate : json::parse(run.out).at("swap_rates")) EXPECT_EQ(rate.get<double>(), 1.0);
}

TEST(Cli, PathsAndOracle) {
  const LabRun single = lab("paths --L 2 --m 2 --i 2 --lambda 0,1,0");
  ASSERT_EQ(single.status, 0);
  const json doc = json::parse(single.out);
  EXPECT_EQ(doc.at("length").get<int>(), 9);
  EXPECT_EQ(doc.at("states").back(), json({0, 1, 1}));
  EXPECT_EQ(lab("paths --input " + data("bimodal.json")).status, 0);
  const LabRun oracle = lab("f-oracle --L 4");
  ASSERT_EQ(oracle.status, 0);
  EXPECT_TRUE(json::parse(oracle.out).at("passed").get<bool>());
}

TEST(Cli, InstanceExport) {
  const LabRun run = lab("instance export --L 1");
  ASSERT_EQ(run.status, 0);
  const json doc = json::parse(run.out);
  EXPECT_EQ(doc.at("gamma"), "8");
  EXPECT_EQ(doc.at("w").at(1), "4096");
}
