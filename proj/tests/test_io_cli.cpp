#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fpnet/cli.hpp"
#include "fpnet/io.hpp"

using namespace fpnet;
using namespace fpnet::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "fpnet_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p.string())); }

int config_error_of(const json& j, std::string* message = nullptr) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    if (message) *message = e.what();
    return 1;
  }
  return 0;
}

}  // namespace

// ----------------------------------------------------------------- CSV

TEST(TraceCsv, RoundTripWithOptionalColumns) {
  RunTrace t;
  t.records.push_back({1, 0.1, 0.5, 0.25, std::nullopt});
  t.records.push_back({2, 0.2, 1.0 / 3.0, std::nullopt, -7.125});
  const std::string text = trace_to_csv(t);
  EXPECT_EQ(text.substr(0, text.find("\r\n")), "iter,normalized_iter,self_residual,oracle_residual,objective");
  EXPECT_NE(text.find("1,0.10000000000000001,0.5,0.25,\r\n"), std::string::npos);
  const RunTrace back = trace_from_csv(text);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].self_residual, 1.0 / 3.0);
  EXPECT_EQ(back.records[0].oracle_residual, 0.25);
  EXPECT_FALSE(back.records[0].objective.has_value());
  EXPECT_FALSE(back.records[1].oracle_residual.has_value());
  EXPECT_EQ(back.records[1].objective, -7.125);
  EXPECT_EQ(trace_to_csv(back), text);
}

TEST(TraceCsv, EmptyTraceIsHeaderOnly) {
  EXPECT_EQ(trace_to_csv(RunTrace{}), "iter,normalized_iter,self_residual\r\n");
  EXPECT_TRUE(trace_from_csv("iter,normalized_iter,self_residual\n").records.empty());
}

TEST(TraceCsv, MalformedInput) {
  EXPECT_THROW(trace_from_csv(""), ConfigError);
  EXPECT_THROW(trace_from_csv("iter,residual\r\n"), ConfigError);
  EXPECT_THROW(trace_from_csv("iter,normalized_iter,self_residual\r\n1,2\r\n"), ConfigError);
  EXPECT_THROW(trace_from_csv("iter,normalized_iter,self_residual\r\n1,x,3\r\n"), ConfigError);
}

TEST(Json, MatrixParsing) {
  const Eigen::MatrixXd m = matrix_from_json(json::parse("[[1,2],[3,4]]"), "A");
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(matrix_from_json(json::parse("[[1,2],[3]]"), "A"), ConfigError);
  EXPECT_THROW(vector_from_json(json::parse("[1,\"a\"]"), "y"), ConfigError);
}

// ----------------------------------------------------------------- config

TEST(Config, DefaultsAndOverrides) {
  const RunConfig c = config_from_json(json::object());
  EXPECT_EQ(c.problem, "lasso_huber");
  EXPECT_EQ(c.mode, DelayMode::synchronous);
  EXPECT_EQ(c.effective_gamma(), 1.0);
  const RunConfig d = config_from_json({{"problem", "svm"}, {"mode", "async"}, {"p", 0.25}, {"seed", 3}});
  EXPECT_EQ(d.mode, DelayMode::asynchronous);
  EXPECT_EQ(d.p, 0.25);
  EXPECT_EQ(d.effective_gamma(), 0.5);
  EXPECT_EQ(config_from_json(to_json(d)).seed, 3u);
}

TEST(Config, ErrorsNameTheField) {
  std::string msg;
  EXPECT_EQ(config_error_of({{"p", 0.0}}, &msg), 1);
  EXPECT_NE(msg.find("p"), std::string::npos);
  EXPECT_EQ(config_error_of({{"p", 1.5}}), 1);
  EXPECT_EQ(config_error_of({{"gamma", 0.0}}, &msg), 1);
  EXPECT_NE(msg.find("gamma"), std::string::npos);
  EXPECT_EQ(config_error_of({{"problem", "knapsack"}}, &msg), 1);
  EXPECT_NE(msg.find("knapsack"), std::string::npos);
  EXPECT_EQ(config_error_of({{"mode", "sometimes"}}), 1);
  EXPECT_EQ(config_error_of({{"seed", -1}}), 1);
  EXPECT_EQ(config_error_of({{"colour", "red"}}, &msg), 1);
  EXPECT_NE(msg.find("colour"), std::string::npos);
}

TEST(Config, InstanceFieldErrors) {
  std::ostringstream err;
  RunConfig c = config_from_json({{"instance", {{"lamda", 1.0}}}});
  EXPECT_EQ(dispatch("run", c, scratch_dir().string(), err), kConfigError);
  EXPECT_NE(err.str().find("lamda"), std::string::npos);
  err.str("");
  c = config_from_json({{"problem", "svm"}, {"instance", {{"agents", 5}, {"degree", 3}}}});
  EXPECT_EQ(dispatch("run", c, scratch_dir().string(), err), kConfigError);
  c = config_from_json({{"problem", "minimax_fir"}, {"instance", {{"num_taps", 14}}}});
  EXPECT_EQ(dispatch("run", c, scratch_dir().string(), err), kConfigError);
  EXPECT_EQ(dispatch("launch", RunConfig{}, scratch_dir().string(), err), kConfigError);
}

// ----------------------------------------------------------------- commands

TEST(Run, DefaultLassoConvergesMonotonically) {
  const auto dir = scratch_dir();
  const auto out = cmd_run(RunConfig{}, dir.string());
  EXPECT_EQ(out.exit_code, kSuccess);
  const json s = read_json(dir / "summary.json");
  EXPECT_TRUE(s["converged"].get<bool>());
  EXPECT_EQ(s["solution"].size(), 20u);
  EXPECT_EQ(s["readout"]["a"].size(), s["readout"]["b"].size());
  const RunTrace t = trace_from_csv(read_text_file((dir / "trace.csv").string()));
  ASSERT_FALSE(t.records.empty());
  ASSERT_TRUE(t.records.front().oracle_residual.has_value());
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LE(*t.records[k].oracle_residual, *t.records[k - 1].oracle_residual * (1.0 + 1e-12) + 1e-15) << k;
  }
  EXPECT_LE(t.records.back().self_residual, 1e-9 * 10.0);
}

TEST(Run, ZeroIterationBudget) {
  const auto dir = scratch_dir();
  RunConfig c;
  c.max_iters = 0;
  EXPECT_EQ(dispatch("run", c, dir.string()), kNotConverged);
  EXPECT_EQ(read_text_file((dir / "trace.csv").string()),
            "iter,normalized_iter,self_residual\r\n");
  EXPECT_FALSE(read_json(dir / "summary.json")["converged"].get<bool>());
}

TEST(Run, AsyncRunsAreReproducible) {
  const auto dir = scratch_dir();
  RunConfig c;
  c.mode = DelayMode::asynchronous;
  c.p = 0.1;
  c.seed = 7;
  c.max_iters = 3000;
  cmd_run(c, (dir / "a").string());
  cmd_run(c, (dir / "b").string());
  EXPECT_EQ(read_text_file((dir / "a" / "trace.csv").string()), read_text_file((dir / "b" / "trace.csv").string()));
  EXPECT_EQ(read_text_file((dir / "a" / "summary.json").string()),
            read_text_file((dir / "b" / "summary.json").string()));
  c.seed = 8;
  cmd_run(c, (dir / "c").string());
  EXPECT_NE(read_text_file((dir / "a" / "trace.csv").string()), read_text_file((dir / "c" / "trace.csv").string()));
}

TEST(Verify, LassoHuberPasses) {
  const auto dir = scratch_dir();
  const auto out = cmd_verify(RunConfig{}, dir.string());
  EXPECT_EQ(out.exit_code, kSuccess) << out.report.dump(2);
  const json r = read_json(dir / "verify.json");
  EXPECT_TRUE(r["orthonormality"]["pass"].get<bool>());
  EXPECT_TRUE(r["neutrality"]["pass"].get<bool>());
  EXPECT_TRUE(r["norm_reduction"]["pass"].get<bool>());
  for (const auto& e : r["dissipativity"]) EXPECT_TRUE(e["pass"].get<bool>()) << e.dump();
}

TEST(Verify, EqualizerReportsNonDissipativeElement) {
  const auto dir = scratch_dir();
  RunConfig c;
  c.problem = "sparse_equalizer";
  const auto out = cmd_verify(c, dir.string());
  EXPECT_EQ(out.exit_code, kSuccess) << out.report.dump(2);
  bool found = false;
  for (const auto& e : out.report["dissipativity"]) {
    if (e["kind"] == "CappedL1") {
      found = true;
      EXPECT_FALSE(e["pass"].get<bool>());
      EXPECT_TRUE(e["informational"].get<bool>());
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(out.report["norm_reduction"]["informational"].get<bool>());
}

TEST(Compare, LassoAugmented) {
  RunConfig c;
  c.problem = "lasso_augmented";
  const auto out = cmd_compare(c, scratch_dir().string());
  EXPECT_EQ(out.exit_code, kSuccess) << out.report.dump(2);
}

TEST(Compare, MinimaxFir) {
  RunConfig c;
  c.problem = "minimax_fir";
  c.tol = 1e-10;
  const auto out = cmd_compare(c, scratch_dir().string());
  EXPECT_EQ(out.exit_code, kSuccess) << out.report.dump(2);
}

TEST(Compare, Svm) {
  RunConfig c;
  c.problem = "svm";
  const auto out = cmd_compare(c, scratch_dir().string());
  EXPECT_EQ(out.exit_code, kSuccess) << out.report.dump(2);
}

TEST(Compare, EqualizerHasNoReference) {
  RunConfig c;
  c.problem = "sparse_equalizer";
  std::ostringstream err;
  EXPECT_EQ(dispatch("compare", c, scratch_dir().string(), err), kConfigError);
  EXPECT_NE(err.str().find("sparse_equalizer"), std::string::npos);
}

// ----------------------------------------------------------------- binary

#ifdef FPNET_CLI_PATH
namespace {
int run_binary(const std::string& args) {
  const std::string cmd = std::string(FPNET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Binary, ExitCodes) {
  const auto dir = scratch_dir();
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(run_binary("run --problem lasso_huber" + out), 0);
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
  EXPECT_EQ(run_binary("run --problem lasso_huber --max-iters 0" + out), 2);
  EXPECT_EQ(run_binary("run --mode async --p 0" + out), 1);
  EXPECT_EQ(run_binary("run --problem nothing" + out), 1);
  EXPECT_EQ(run_binary("run --bogus-flag" + out), 1);
  EXPECT_EQ(run_binary("compare --problem sparse_equalizer" + out), 1);
}

TEST(Binary, ConfigFileAndFlagOverride) {
  const auto dir = scratch_dir();
  write_text_file((dir / "cfg.json").string(), R"({"problem": "lasso_huber", "max_iters": 0})");
  EXPECT_EQ(run_binary("run --config " + (dir / "cfg.json").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run_binary("run --config " + (dir / "cfg.json").string() + " --max-iters 100000 --out " + dir.string()), 0);
  write_text_file((dir / "bad.json").string(), "{not json");
  EXPECT_EQ(run_binary("run --config " + (dir / "bad.json").string() + " --out " + dir.string()), 1);
}
#endif
