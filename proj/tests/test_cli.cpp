#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
#ifdef M2FGB_CLI_PATH
  return M2FGB_CLI_PATH;
#else
  const char* p = std::getenv("M2FGB_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
#endif
}

struct RunResult {
  int exit_code = 0;
  std::string output;
};

RunResult run(const std::string& args, const fs::path& dir) {
  fs::path out_file = dir / "cmd_output.txt";
  std::string cmd = cli_path() + " " + args + " > " + out_file.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("m2fgb_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

// generates a synthetic CSV + schema pair via the CLI itself
void make_data(const TempDir& dir) {
  write_file(dir.path / "synth.conf",
             "n = 600\n"
             "d = 4\n"
             "noise = 0.4\n"
             "seed = 5\n"
             "groups = a:0.5:0.6:1.0;b:0.3:0.4:0.7;c:0.2:0.5:-0.5\n");
  auto r = run("synth --config " + (dir.path / "synth.conf").string() + " --out " +
                   (dir.path / "data").string(),
               dir.path);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(dir.path / "data" / "synth.csv"));
  REQUIRE(fs::exists(dir.path / "data" / "synth.schema"));
}

std::string base_config(const TempDir& dir) {
  fs::path cfg = dir.path / "run.conf";
  write_file(cfg,
             "data = " + (dir.path / "data" / "synth.csv").string() + "\n" +
                 "schema = " + (dir.path / "data" / "synth.schema").string() + "\n" +
                 "lambda = 0.5\n"
                 "rounds = 15\n"
                 "learning_rate = 0.2\n"
                 "dual_learning_rate = 0.3\n"
                 "group_kind = equalized\n"
                 "max_depth = 3\n"
                 "min_samples_leaf = 5\n");
  return cfg.string();
}

}  // namespace

TEST_CASE("train writes model, preprocessor, trace and metrics") {
  TempDir dir;
  make_data(dir);
  std::string cfg = base_config(dir);
  fs::path out = dir.path / "run1";
  auto r = run("train --config " + cfg + " --out " + out.string() + " --seed 3", dir.path);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "model.txt"));
  CHECK(fs::exists(out / "preprocessor.txt"));
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "metrics.json"));

  std::ifstream trace(out / "trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header.find("round") != std::string::npos);
  CHECK(header.find("overall_loss") != std::string::npos);
  CHECK(header.find("epsilon") != std::string::npos);
  int rows = 0;
  std::string line;
  while (std::getline(trace, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 15);

  auto metrics = nlohmann::json::parse(read_file(out / "metrics.json"));
  CHECK(metrics.contains("train"));
  CHECK(metrics.contains("validation"));
}

TEST_CASE("training is reproducible byte for byte") {
  TempDir dir;
  make_data(dir);
  std::string cfg = base_config(dir);
  auto a = run("train --config " + cfg + " --out " + (dir.path / "a").string() + " --seed 3",
               dir.path);
  auto b = run("train --config " + cfg + " --out " + (dir.path / "b").string() + " --seed 3",
               dir.path);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(read_file(dir.path / "a" / "model.txt") == read_file(dir.path / "b" / "model.txt"));
  CHECK(read_file(dir.path / "a" / "trace.csv") == read_file(dir.path / "b" / "trace.csv"));
}

TEST_CASE("out-of-range lambda exits with a config error") {
  TempDir dir;
  make_data(dir);
  fs::path cfg = dir.path / "bad.conf";
  write_file(cfg, "data = " + (dir.path / "data" / "synth.csv").string() + "\n" +
                      "schema = " + (dir.path / "data" / "synth.schema").string() + "\n" +
                      "lambda = 1.5\n");
  auto r = run("train --config " + cfg.string() + " --out " + (dir.path / "o").string(),
               dir.path);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("lambda") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected") {
  TempDir dir;
  make_data(dir);
  fs::path cfg = dir.path / "bad.conf";
  write_file(cfg, "data = " + (dir.path / "data" / "synth.csv").string() + "\n" +
                      "schema = " + (dir.path / "data" / "synth.schema").string() + "\n" +
                      "lerning_rate = 0.1\n");
  auto r = run("train --config " + cfg.string() + " --out " + (dir.path / "o").string(),
               dir.path);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("lerning_rate") != std::string::npos);
}

TEST_CASE("evaluate agrees with the training report") {
  TempDir dir;
  make_data(dir);
  std::string cfg = base_config(dir);
  fs::path out = dir.path / "run";
  REQUIRE(run("train --config " + cfg + " --out " + out.string() + " --seed 3", dir.path)
              .exit_code == 0);
  auto r = run("--json evaluate --model " + (out / "model.txt").string() + " --data " +
                   (dir.path / "data" / "synth.csv").string() + " --schema " +
                   (dir.path / "data" / "synth.schema").string() + " --metric accuracy",
               dir.path);
  REQUIRE(r.exit_code == 0);
  auto eval = nlohmann::json::parse(r.output);
  CHECK(eval.contains("performance"));
  CHECK(eval.contains("per_group"));
  CHECK(eval["per_group"].size() == 3);
  double perf = eval["performance"].get<double>();
  CHECK(perf >= 0.0);
  CHECK(perf <= 1.0);
}

TEST_CASE("tpr on a dataset with a positive-free group exits with a data error") {
  TempDir dir;
  // two groups, group b has no positive labels
  write_file(dir.path / "d.csv",
             "x,grp,label\n"
             "0.1,a,1\n-0.2,a,0\n0.3,a,1\n-0.4,a,0\n0.5,a,1\n-0.6,a,0\n"
             "0.7,b,0\n-0.8,b,0\n0.9,b,0\n-1.0,b,0\n1.1,b,0\n-1.2,b,0\n");
  write_file(dir.path / "d.schema",
             "task = classification\nx = numeric\ngrp = group\nlabel = label\n");
  fs::path cfg = dir.path / "run.conf";
  write_file(cfg, "data = " + (dir.path / "d.csv").string() + "\n" +
                      "schema = " + (dir.path / "d.schema").string() + "\n" +
                      "group_kind = true_positive\nrounds = 5\n");
  auto r = run("train --config " + cfg.string() + " --out " + (dir.path / "o").string(),
               dir.path);
  CHECK(r.exit_code == 2);
}

TEST_CASE("project subcommand mirrors the simplex projection") {
  TempDir dir;
  auto r = run("--json project --lambda 1.0 -- 0.25 0.25", dir.path);
  REQUIRE(r.exit_code == 0);
  auto w = nlohmann::json::parse(r.output);
  REQUIRE(w.size() == 2);
  CHECK(w[0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("missing subcommand or file reports usage errors") {
  TempDir dir;
  auto r = run("train --config " + (dir.path / "absent.conf").string() + " --out " +
                   (dir.path / "o").string(),
               dir.path);
  CHECK(r.exit_code == 1);
}
