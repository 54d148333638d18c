#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace jmsdp {
namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string sample(const char* name) { return std::string(JMSDP_SAMPLES_DIR) + "/" + name; }

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, JmCheckPauliPairIsIncompatible) {
  const auto o = run_cli({"jm-check", "--effects", sample("pauli-xz.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = io::parse(o.out);
  EXPECT_EQ(j["schema"], "specjm/1");
  EXPECT_EQ(j["status"], "Incompatible");
  EXPECT_TRUE(j.contains("capped"));
  EXPECT_TRUE(j.contains("margin"));
}

TEST(Cli, RobustnessPauliPair) {
  const auto o = run_cli({"robustness", "--effects", sample("pauli-xz.json"), "--direction", "1,1", "--noise", "balanced"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = io::parse(o.out);
  EXPECT_NEAR(j["t_star"].get<double>(), 0.70711, 1e-5);
  EXPECT_EQ(j["capped"], false);
}

TEST(Cli, RobustnessPauliTripleCsv) {
  const auto o = run_cli({"--format", "csv", "robustness", "--effects", sample("pauli-xyz.json"), "--direction", "1,1,1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("s1,s2,s3,t_star,kind\n1,1,1,0.5773502", 0), 0u) << o.out;
}

TEST(Cli, SpinGenWritesAnticommutingTuple) {
  const auto path = temp_file("jmsdp_cli_spins.json");
  const auto o = run_cli({"spin-gen", "--g", "5", "--out", path.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto x = io::matrix_tuple_from_json(io::read_file(path.string()));
  EXPECT_EQ(x.size(), 5u);
  EXPECT_EQ(x.level(), 4u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = i + 1; k < 5; ++k) EXPECT_EQ((x[i] * x[k] + x[k] * x[i]).max_abs(), 0.0);
  EXPECT_EQ(io::to_json(x).dump(2) + "\n", slurp(path));
  std::filesystem::remove(path);
}

TEST(Cli, SpinGenAsEffectsFeedsRobustness) {
  const auto path = temp_file("jmsdp_cli_spin_effects.json");
  ASSERT_EQ(run_cli({"spin-gen", "--g", "4", "--as-effects", "--out", path.string()}).code, 0);
  const auto o = run_cli({"robustness", "--effects", path.string(), "--direction", "1,1,1,1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(io::parse(o.out)["t_star"].get<double>(), 0.5, 1e-5);
  std::filesystem::remove(path);
}

TEST(Cli, MubGenAndZhu) {
  const auto path = temp_file("jmsdp_cli_mub.json");
  ASSERT_EQ(run_cli({"mub-gen", "--d", "2", "--count", "2", "--out", path.string()}).code, 0);
  const auto t = io::effect_tuple_from_json(io::read_file(path.string()));
  EXPECT_EQ(t.size(), 2u);
  const auto o = run_cli({"zhu", "--effects", path.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = io::parse(o.out);
  EXPECT_NEAR(j["value"].get<double>(), 3.0, 1e-6);
  EXPECT_EQ(j["certified_incompatible"], true);
  EXPECT_EQ(run_cli({"mub-gen", "--d", "4"}).code, 1);
  std::filesystem::remove(path);
}

TEST(Cli, CloneRegion) {
  const auto o = run_cli({"--format", "csv", "clone-region", "--kind", "clone", "--g", "2", "--d", "2", "--s", "1,0"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "s1,s2,margin,kind\n1,0,0,clone\n");
  const auto grid = run_cli({"clone-region", "--kind", "qc", "--g", "2", "--grid", "3"});
  ASSERT_EQ(grid.code, 0);
  const auto rows = io::parse(grid.out)["rows"];
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[4]["member"], true);
  EXPECT_EQ(rows[8]["member"], false);
  EXPECT_EQ(run_cli({"clone-region", "--kind", "nope", "--g", "2", "--s", "1,0"}).code, 2);
  EXPECT_EQ(run_cli({"clone-region", "--kind", "clone", "--g", "2", "--d", "2", "--s", "2,0"}).code, 1);
}

TEST(Cli, DiamondCheck) {
  const auto path = temp_file("jmsdp_cli_diamond.json");
  io::write_file(path.string(), io::to_json(MatrixTuple({pauli_x() * 0.5, pauli_z() * 0.5})));
  const auto o = run_cli({"diamond-check", "--tuple", path.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = io::parse(o.out);
  EXPECT_EQ(j["diamond"]["member"], true);
  EXPECT_EQ(j["ball"]["member"], true);
  const auto e = io::parse(run_cli({"diamond-check", "--effects", sample("pauli-xz.json")}).out);
  EXPECT_EQ(e["status"], "Incompatible");
  EXPECT_EQ(e["level1"], true);
  std::filesystem::remove(path);
}

TEST(Cli, SweepIsOrderedAndReproducible) {
  const std::vector<std::string> args = {"--format", "csv", "sweep", "--effects", sample("pauli-xz.json"), "--points", "7"};
  setenv("JMSDP_THREADS", "1", 1);
  const auto one = run_cli(args);
  setenv("JMSDP_THREADS", "4", 1);
  const auto four = run_cli(args);
  unsetenv("JMSDP_THREADS");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  std::istringstream lines(one.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "s1,s2,t_star,kind");
  double prev_angle = -1.0;
  int n = 0;
  while (std::getline(lines, line)) {
    double s1 = 0, s2 = 0, t = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &s1, &s2, &t), 3);
    const double angle = std::atan2(s2, s1);
    EXPECT_GT(angle, prev_angle);
    prev_angle = angle;
    EXPECT_NEAR(t, 1.0, 1e-6);  // Pauli pair under balanced noise: t* along unit directions is 1.
    ++n;
  }
  EXPECT_EQ(n, 7);
}

TEST(Cli, SweepSeededDirectionsForLargerG) {
  const std::vector<std::string> args = {"--seed", "3", "sweep", "--effects", sample("pauli-xyz.json"), "--points", "3"};
  const auto a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(io::parse(a.out)["rows"].size(), 3u);
}

TEST(Cli, SamplesRoundTrip) {
  for (const char* name : {"pauli-xz.json", "pauli-xyz.json"}) {
    const auto first = io::effect_tuple_from_json(io::read_file(sample(name)));
    const auto text = io::to_json(first).dump();
    const auto second = io::effect_tuple_from_json(io::parse(text));
    EXPECT_TRUE(first == second);
    EXPECT_EQ(io::to_json(second).dump(), text);
  }
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"jm-check"}).code, 2);
  EXPECT_EQ(run_cli({"--format", "xml", "jm-check", "--effects", sample("pauli-xz.json")}).code, 2);
  EXPECT_EQ(run_cli({"robustness", "--effects", sample("pauli-xz.json"), "--direction", "a,1"}).code, 2);
  EXPECT_EQ(run_cli({"robustness", "--effects", sample("pauli-xz.json"), "--direction", "1,1", "--noise", "pink"}).code, 2);
  EXPECT_EQ(run_cli({"--format", "csv", "spin-gen", "--g", "3"}).code, 2);
  const auto help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("robustness"), std::string::npos);
  EXPECT_NE(help.out.find("--format"), std::string::npos);
}

TEST(Cli, DomainErrors) {
  EXPECT_EQ(run_cli({"jm-check", "--effects", "/nonexistent/effects.json"}).code, 1);
  EXPECT_EQ(run_cli({"--cap-g", "2", "jm-check", "--effects", sample("pauli-xyz.json")}).code, 1);
  EXPECT_EQ(run_cli({"robustness", "--effects", sample("pauli-xz.json"), "--direction", "1,1,1"}).code, 1);
  const auto bad = temp_file("jmsdp_cli_bad.json");
  std::ofstream(bad) << R"({"schema":"specjm/1","g":1,"dim":1,"effects":[{"dim":1,"re":[[2.0]]}]})";
  const auto o = run_cli({"jm-check", "--effects", bad.string()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("NotEffect"), std::string::npos) << o.err;
  std::filesystem::remove(bad);
}

TEST(Cli, SelftestPassesAndReportsTiming) {
  const auto o = run_cli({"selftest", "--only", "1,7,8,9"});
  EXPECT_EQ(o.code, 0) << o.out << o.err;
  EXPECT_NE(o.out.find("[PASS]  1 pauli-pair-robustness"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("4 checks, 0 failed"), std::string::npos);
  EXPECT_NE(o.out.find("s  t*="), std::string::npos);
}

TEST(Cli, SelftestFaultInjectionNamesCriterion) {
  const auto o = run_cli({"--tol", "0.5", "selftest", "--only", "1"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("[FAIL]  1 pauli-pair-robustness"), std::string::npos) << o.out;
  EXPECT_NE(o.err.find("criterion 1 (pauli-pair-robustness) failed"), std::string::npos) << o.err;
}

}  // namespace
}  // namespace jmsdp
