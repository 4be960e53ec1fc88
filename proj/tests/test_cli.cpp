#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using lognls::cli::run_cli;

namespace {

const fs::path kConfigs = fs::path(LOGNLS_SOURCE_DIR) / "configs";

struct Outcome {
  int code;
  std::string out, err;
  fs::path dir;
};

fs::path fresh_root(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "lognls_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome run(const fs::path& root, std::vector<std::string> args) {
  args.push_back("--out-dir");
  args.push_back(root.string());
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  fs::path dir;
  for (const auto& e : fs::directory_iterator(root)) dir = e.path();
  return {code, out.str(), err.str(), dir};
}

Outcome run_config(const std::string& test, const std::string& command, const std::string& config) {
  return run(fresh_root(test), {command, "--config", (kConfigs / config).string()});
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path write_temp_config(const std::string& name, const std::string& text) {
  const fs::path p = fresh_root("configs") / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, GaussonRunWritesManifestAndOutputs) {
  const auto r = run_config("gausson", "gausson", "gausson.yaml");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_json(r.dir / "manifest.json");
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["command"], "gausson");
  EXPECT_EQ(m["version"], "lognls 0.1.0");
  for (const auto& name : m["outputs"]) EXPECT_TRUE(fs::exists(r.dir / name.get<std::string>())) << name;
  const auto s = read_json(r.dir / "summary.json");
  EXPECT_LT(s["max_relative_error"].get<double>(), 1e-4);
  const auto [header, rows] = lognls::io::read_csv(r.dir / "trajectory.csv");
  EXPECT_EQ(rows.size(), 21u);
}

TEST(Cli, RunIdIsContentAddressed) {
  const auto a = run_config("id_a", "matrix-ode", "matrix_ode.yaml");
  const auto b = run_config("id_b", "matrix-ode", "matrix_ode.yaml");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.dir.filename(), b.dir.filename());
  EXPECT_EQ(read_json(a.dir / "manifest.json")["run_id"], read_json(b.dir / "manifest.json")["run_id"]);
  const auto c = run_config("id_c", "matrix-ode", "matrix_ode_coupled.yaml");
  EXPECT_NE(a.dir.filename(), c.dir.filename());
}

TEST(Cli, MatrixOdeFixedPointStaysPut) {
  const auto r = run_config("matrix", "matrix-ode", "matrix_ode.yaml");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(read_json(r.dir / "summary.json")["max_deviation_from_initial"].get<double>(), 1e-12);
}

TEST(Cli, BreatherFirstIntegralConstant) {
  const auto r = run_config("breather", "breather", "breather.yaml");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(r.dir / "summary.json");
  EXPECT_LT(s["first_integral_drift"].get<double>(), 1e-8);
  EXPECT_TRUE(s.contains("period"));
}

TEST(Cli, MissingLambdaIsConfigError) {
  const fs::path cfg = write_temp_config("no_lambda.yaml", "alpha: [1.0, 0.0]\nt_end: 1.0\n");
  const auto r = run(fresh_root("no_lambda"), {"breather", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lambda"), std::string::npos) << r.err;
  EXPECT_EQ(read_json(r.dir / "manifest.json")["exit_code"], 2);
}

TEST(Cli, MistypedFieldNamesLine) {
  const fs::path cfg = write_temp_config("bad_dt.yaml", "lambda: 1.0\nalpha: [1.0, 0.0]\nt_end: abc\n");
  const auto r = run(fresh_root("bad_dt"), {"breather", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("t_end"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, UnknownOptionAndMissingFile) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"gausson", "--config", "/nonexistent.yaml"}, out, err), 2);
  EXPECT_EQ(run_cli({"frobnicate"}, out, err), 2);
}

TEST(Cli, SingleMemberWritesFloorOnly) {
  const auto r = run_config("single", "build-multisoliton", "single_gausson_1d.yaml");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(r.dir / "floor.json"));
  EXPECT_TRUE(fs::exists(r.dir / "control.csv"));
  EXPECT_FALSE(fs::exists(r.dir / "fit.json"));
  EXPECT_LT(read_json(r.dir / "floor.json")["floor"].get<double>(), 1e-5);
}

TEST(Cli, OverlappingMembersHitValidityGate) {
  const auto r = run_config("overlap", "build-multisoliton", "overlapping_gaussons_1d.yaml");
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, BreathersRejectedByGaussonBuilder) {
  const auto r = run_config("breathers", "build-multisoliton", "two_breathers_1d.yaml");
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, LocalizedStationaryIsFlat) {
  const auto r = run_config("localized", "localized", "localized_stationary.yaml");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(r.dir / "slow_variation.json");
  EXPECT_LT(s["max_abs_dS_dt"].get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(r.dir / "localized.csv"));
}

TEST(Cli, LocalizedOverlapHitsValidityGate) {
  const auto r = run_config("localized_overlap", "localized", "localized_overlap.yaml");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("SupportsOverlap"), std::string::npos) << r.err;
}

TEST(Cli, VerifyInequalitiesIsDeterministic) {
  const std::vector<std::string> args{"verify-inequalities", "--samples", "1000", "--seed", "42"};
  const auto a = run(fresh_root("verify_a"), args);
  auto args_jobs = args;
  args_jobs.insert(args_jobs.end(), {"--jobs", "3"});
  const auto b = run(fresh_root("verify_b"), args_jobs);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.dir.filename(), b.dir.filename());
  for (const char* name : {"log_pair.json", "F1_expansion.json", "zlogz_lipschitz.json", "gauss_tails.json"})
    EXPECT_EQ(slurp(a.dir / name), slurp(b.dir / name)) << name;
  const auto c = run(fresh_root("verify_c"), {"verify-inequalities", "--samples", "1000", "--seed", "43"});
  EXPECT_NE(slurp(a.dir / "log_pair.json"), slurp(c.dir / "log_pair.json"));
}

TEST(Cli, AcceptanceSelfTest) {
  const auto ok = run(fresh_root("acc_ok"), {"acceptance", "--only", "1"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("PASS  criterion 1"), std::string::npos) << ok.out;
  const auto bad = run(fresh_root("acc_bad"), {"acceptance", "--only", "1", "--corrupt", "1"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL  criterion 1"), std::string::npos) << bad.out;
  const auto j = read_json(bad.dir / "acceptance.json");
  EXPECT_EQ(j["failed"], json::array({1}));
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"acceptance", "--only", "13"}, out, err), 2);
}
