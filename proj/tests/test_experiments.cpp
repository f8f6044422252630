#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherence/error.hpp"
#include "coherence/experiments.hpp"

namespace coherence {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" COHERENCE_LAB_BINARY "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (const char c : text) n += c == '\n';
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coherence_lab_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  std::string out(const std::string& sub) const { return "--out '" + (dir_ / sub).string() + "'"; }

  fs::path dir_;
};

TEST_F(CliTest, ConcentrateQubitWorkedExample) {
  const auto state = write("state.json", R"({"re": [[0.9, 0.1], [0.1, 0.1]]})");
  const CliRun r = run_cli("concentrate --state '" + state.string() + "' " + out("a"));
  ASSERT_EQ(r.exit_code, 0);
  const json summary = json::parse(r.out);
  EXPECT_NEAR(summary.at("delta_m").get<double>(), 0.028062484748656982, 1e-15);
  EXPECT_NEAR(summary.at("modes").at(0).at("bounds").at("achieved").get<double>(), 0.028062484748656982, 1e-6);
  const json manifest = json::parse(slurp(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest.at("command"), "concentrate");
  EXPECT_EQ(manifest.at("version"), "1.0.0");
  EXPECT_TRUE(manifest.at("config").contains("state_data"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "report.json"));
}

TEST_F(CliTest, ExitCodes) {
  const auto bad = write("bad.json", R"({"nx": 0.9, "nz": 0.9})");
  EXPECT_EQ(run_cli("concentrate --state '" + bad.string() + "' " + out("a")).exit_code, 1);
  const auto garbage = write("garbage.json", "{not json");
  EXPECT_EQ(run_cli("concentrate --state '" + garbage.string() + "' " + out("a")).exit_code, 1);
  EXPECT_EQ(run_cli("concentrate " + out("a")).exit_code, 1);
  EXPECT_EQ(run_cli("bound-compare --dim 5 " + out("b")).exit_code, 2);
  EXPECT_EQ(run_cli("amplify --steps 5000 " + out("c")).exit_code, 1);
  EXPECT_EQ(run_cli("field --bogus").exit_code, 1);
  EXPECT_EQ(run_cli("").exit_code, 1);
  EXPECT_EQ(run_cli("--version").exit_code, 0);
  const auto big = write("big.json", R"({"re": [[0.2,0,0,0,0],[0,0.2,0,0,0],[0,0,0.2,0,0],[0,0,0,0.2,0],[0,0,0,0,0.2]]})");
  EXPECT_EQ(run_cli("concentrate --state '" + big.string() + "' " + out("d")).exit_code, 2);
}

TEST_F(CliTest, FieldGridHasFourHundredRows) {
  ASSERT_EQ(run_cli("field " + out("f")).exit_code, 0);
  const std::string csv = slurp(dir_ / "f" / "field.csv");
  EXPECT_EQ(line_count(csv), 401u);
  ASSERT_EQ(run_cli("field --grid 5x7 " + out("g")).exit_code, 0);
  EXPECT_EQ(line_count(slurp(dir_ / "g" / "field.csv")), 36u);
}

TEST_F(CliTest, NogoDefaultsToIsotropicStates) {
  const CliRun r = run_cli("nogo --samples 100 " + out("n"));
  ASSERT_EQ(r.exit_code, 0);
  const json summary = json::parse(r.out);
  ASSERT_EQ(summary.at("cases").size(), 3u);
  for (const auto& c : summary.at("cases")) {
    EXPECT_EQ(c.at("verdict"), "no_go");
    EXPECT_TRUE(c.at("correlated").get<bool>());
    for (const auto& g : c.at("random_unitary_gains")) EXPECT_LE(g.at("max_gain").get<double>(), 1e-9);
  }
  EXPECT_TRUE(fs::exists(dir_ / "n" / "nogo.json"));
}

TEST_F(CliTest, ConcatWritesOneTracePerStart) {
  const CliRun r = run_cli("concat --nx 0.001,0.1 --nz 0.7,0.5 " + out("c"));
  ASSERT_EQ(r.exit_code, 0);
  const json summary = json::parse(r.out);
  ASSERT_EQ(summary.at("runs").size(), 2u);
  EXPECT_EQ(summary.at("runs").at(0).at("status"), "converged");
  const std::string trace = slurp(dir_ / "c" / "trace_000.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "step,n_x,n_z,copies_consumed,m1,purity_ceiling");
  EXPECT_TRUE(fs::exists(dir_ / "c" / "trace_001.csv"));
  EXPECT_EQ(run_cli("concat --nx 0.1,0.2 --nz 0.5,0.4,0.3 " + out("d")).exit_code, 1);
  // a single value is shared by every start
  EXPECT_EQ(run_cli("concat --nx 0.1,0.2 --nz 0.5 " + out("e")).exit_code, 0);
}

TEST_F(CliTest, AmplifyReportsRatio) {
  const CliRun r = run_cli("amplify --steps 10 --eps 0.1 " + out("a"));
  ASSERT_EQ(r.exit_code, 0);
  const json s = json::parse(r.out);
  EXPECT_TRUE(s.at("m1_below_2^-N").get<bool>());
  EXPECT_TRUE(s.at("ratio_exceeds_bound").get<bool>());
  EXPECT_GT(s.at("ratio").get<double>(), 29.9);
  EXPECT_EQ(line_count(slurp(dir_ / "a" / "amplify_trace.csv")), 12u);
}

TEST_F(CliTest, BoundCompareIsDeterministic) {
  ASSERT_EQ(run_cli("bound-compare --seed 42 --samples 20 " + out("x")).exit_code, 0);
  ASSERT_EQ(run_cli("bound-compare --seed 42 --samples 20 " + out("y")).exit_code, 0);
  const std::string a = slurp(dir_ / "x" / "bound_compare.csv");
  EXPECT_EQ(line_count(a), 1u + 3 * 20 * 2);
  EXPECT_EQ(a, slurp(dir_ / "y" / "bound_compare.csv"));
  ASSERT_EQ(run_cli("bound-compare --seed 43 --samples 20 " + out("z")).exit_code, 0);
  EXPECT_NE(a, slurp(dir_ / "z" / "bound_compare.csv"));
}

TEST_F(CliTest, ManifestReproducesRun) {
  ASSERT_EQ(run_cli("bound-compare --seed 7 --samples 10 --ranks 2,3 " + out("x")).exit_code, 0);
  const std::string manifest = (dir_ / "x" / "manifest.json").string();
  ASSERT_EQ(run_cli("bound-compare --config '" + manifest + "' " + out("y")).exit_code, 0);
  EXPECT_EQ(slurp(dir_ / "x" / "bound_compare.csv"), slurp(dir_ / "y" / "bound_compare.csv"));
  EXPECT_EQ(slurp(dir_ / "x" / "manifest.json"), slurp(dir_ / "y" / "manifest.json"));
  // The manifest belongs to another command.
  EXPECT_EQ(run_cli("field --config '" + manifest + "' " + out("z")).exit_code, 1);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  ASSERT_EQ(run_cli("bound-compare --samples 5 --ranks 2 " + out("x"), "COHERENCE_LAB_SEED=11").exit_code, 0);
  ASSERT_EQ(run_cli("bound-compare --samples 5 --ranks 2 --seed 11 " + out("y")).exit_code, 0);
  EXPECT_EQ(slurp(dir_ / "x" / "bound_compare.csv"), slurp(dir_ / "y" / "bound_compare.csv"));
  EXPECT_EQ(json::parse(slurp(dir_ / "x" / "manifest.json")).at("seed"), 11);
  ASSERT_EQ(run_cli("bound-compare --samples 5 --ranks 2 --seed 12 " + out("z"), "COHERENCE_LAB_SEED=11").exit_code, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "z" / "manifest.json")).at("seed"), 12);
}

TEST_F(CliTest, PureQutritsAlwaysTie) {
  const CliRun r = run_cli("bound-compare --ranks 1 " + out("p"));
  ASSERT_EQ(r.exit_code, 0);
  const json s = json::parse(r.out);
  for (const auto& m : s.at("ranks").at(0).at("tighter_counts")) EXPECT_EQ(m.at("tie"), 100);
}

TEST(Experiments, ConfigSeedAndListParsing) {
  EXPECT_EQ(parse_real_list("0.1, 0.5,1"), (std::vector<double>{0.1, 0.5, 1.0}));
  EXPECT_EQ(parse_count_list("1,2,3"), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_THROW(parse_real_list("0.1,,x"), ValidationError);
  EXPECT_THROW(parse_count_list("-1"), ValidationError);
  ::unsetenv(kSeedEnvVar);
  EXPECT_EQ(resolve_seed(std::nullopt, std::nullopt), 0u);
  EXPECT_EQ(resolve_seed(std::nullopt, 5), 5u);
  ::setenv(kSeedEnvVar, "9", 1);
  EXPECT_EQ(resolve_seed(std::nullopt, std::nullopt), 9u);
  EXPECT_EQ(resolve_seed(std::nullopt, 5), 5u);
  EXPECT_EQ(resolve_seed(3, 5), 3u);
  ::setenv(kSeedEnvVar, "nine", 1);
  EXPECT_THROW(resolve_seed(std::nullopt, std::nullopt), ValidationError);
  ::unsetenv(kSeedEnvVar);
}

TEST(Experiments, UnknownParametersRejected) {
  ExperimentConfig cfg;
  cfg.command = "field";
  cfg.out_dir = fs::temp_directory_path() / ("coherence_lab_unknown_" + std::to_string(::getpid()));
  cfg.params = {{"radial", 3}, {"angular", 3}, {"typo", 1}};
  EXPECT_THROW(run_command(cfg), ValidationError);
  cfg.command = "nope";
  cfg.params = json::object();
  EXPECT_THROW(run_command(cfg), ValidationError);
  fs::remove_all(cfg.out_dir);
  EXPECT_EQ(command_names().size(), 6u);
}

TEST(Experiments, ManifestLayout) {
  ExperimentConfig cfg;
  cfg.command = "amplify";
  cfg.seed = 4;
  const json m = manifest_for(cfg, {{"steps", 10}});
  EXPECT_EQ(m.at("command"), "amplify");
  EXPECT_EQ(m.at("version"), kArtifactVersion);
  EXPECT_EQ(m.at("seed"), 4);
  EXPECT_EQ(m.at("config").at("steps"), 10);
}

}  // namespace
}  // namespace coherence
