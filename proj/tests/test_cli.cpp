#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmrnn/cli.hpp"
#include "dmrnn/serialize.hpp"

using namespace dmrnn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dmrnn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json tiny_train_json(int steps, std::uint64_t seed = 5) {
  return Json{{"d", 2},      {"m", 2},
              {"vocab", {"A", "B"}}, {"K", 4},
              {"eps", 1e-6}, {"seed", seed},
              {"learning_rate", 0.3}, {"steps", steps},
              {"log_every", 2}, {"data", {{"A", "B", "A", "B", "A", "B"}}}};
}

double parse_reported_nll(const std::string& text) {
  const auto pos = text.find("NLL ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + 4));
}

}  // namespace

TEST_CASE("cmd_verify passes at sane tolerances and fails at absurd ones") {
  std::ostringstream out;
  VerifyOptions opt;
  opt.trials = 25;
  opt.d = 2;
  opt.seed = 42;
  CHECK(cmd_verify(opt, out) == kExitOk);
  CHECK(out.str().find("all suites passed") != std::string::npos);

  opt.tol = 1e-20;  // impossible by construction
  std::ostringstream fail_out;
  CHECK(cmd_verify(opt, fail_out) == kExitFailure);
  CHECK(fail_out.str().find("worst") != std::string::npos);
  CHECK(fail_out.str().find("first failure seed") != std::string::npos);

  opt.d = 0;
  std::ostringstream usage_out;
  CHECK(cmd_verify(opt, usage_out) == kExitUsage);
}

TEST_CASE("demo ambiguity emits the 0-1-0 entropy arc") {
  const fs::path dir = fresh_dir("demo_ambiguity");
  std::ostringstream out;
  CHECK(cmd_demo({"ambiguity", dir}, out) == kExitOk);
  std::ifstream csv(dir / "ambiguity.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,vne_bits,purity,top_weight");
  const double expected[] = {0.0, 1.0, 0.0};
  for (int t = 0; t < 3; ++t) {
    std::string line;
    REQUIRE(std::getline(csv, line));
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    CHECK(std::stol(cell) == t);
    std::getline(fields, cell, ',');
    CHECK(std::abs(std::stod(cell) - expected[t]) <= 1e-9);
  }
}

TEST_CASE("demo coherence contrasts mixture and superposition") {
  const fs::path dir = fresh_dir("demo_coherence");
  std::ostringstream out;
  CHECK(cmd_demo({"coherence", dir}, out) == kExitOk);

  const std::string metrics = slurp(dir / "coherence_metrics.csv");
  std::istringstream lines(metrics);
  std::string header, mix_row, sup_row;
  std::getline(lines, header);
  std::getline(lines, mix_row);
  std::getline(lines, sup_row);
  CHECK(header == "state,vne_bits,purity");
  CHECK(mix_row.rfind("mix,1,0.5", 0) == 0);
  CHECK(sup_row.rfind("sup,", 0) == 0);
  // sup: vne 0 (to 1e-9), purity 1 (to 1e-9)
  std::istringstream sup_fields(sup_row);
  std::string cell;
  std::getline(sup_fields, cell, ',');
  std::getline(sup_fields, cell, ',');
  CHECK(std::abs(std::stod(cell)) <= 1e-9);
  std::getline(sup_fields, cell, ',');
  CHECK(std::abs(std::stod(cell) - 1.0) <= 1e-9);

  const std::string table = slurp(dir / "coherence_measurements.csv");
  CHECK(table.find("basis,state,p0,p1") == 0);
  CHECK(table.find("computational,mix,0.5,0.5") != std::string::npos);
  CHECK(table.find("computational,sup,") != std::string::npos);
  CHECK(table.find("plusminus,mix,0.5,0.5") != std::string::npos);
  CHECK(table.find("plusminus,sup,1,") != std::string::npos);
}

TEST_CASE("demo bell separates product from entangled correlations") {
  const fs::path dir = fresh_dir("demo_bell");
  std::ostringstream out;
  CHECK(cmd_demo({"bell", dir}, out) == kExitOk);
  const std::string csv = slurp(dir / "bell.csv");
  std::istringstream lines(csv);
  std::string header, sep_row, bell_row;
  std::getline(lines, header);
  std::getline(lines, sep_row);
  std::getline(lines, bell_row);
  CHECK(header == "state,qmi_bits");
  CHECK(std::abs(std::stod(sep_row.substr(sep_row.find(',') + 1))) <= 1e-9);
  CHECK(std::abs(std::stod(bell_row.substr(bell_row.find(',') + 1)) - 2.0) <=
        1e-9);
}

TEST_CASE("cmd_demo rejects unknown names") {
  std::ostringstream out;
  CHECK(cmd_demo({"mystery", fresh_dir("demo_bad")}, out) == kExitUsage);
}

TEST_CASE("cmd_train writes a checkpoint and loss curve") {
  const fs::path dir = fresh_dir("train_small");
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg, tiny_train_json(4).dump(2));
  std::ostringstream out;
  CHECK(cmd_train({cfg, dir / "out"}, out) == kExitOk);
  CHECK(out.str().find("final NLL") != std::string::npos);

  const std::string loss = slurp(dir / "out" / "loss.csv");
  CHECK(loss.rfind("step,loss\n0,", 0) == 0);
  CHECK(loss.find("\n4,") != std::string::npos);

  const Json ckpt = load_json_file(dir / "out" / "checkpoint.json");
  CHECK(ckpt.at("schema") == "dmrnn-v1");
  CHECK_NOTHROW(params_from_checkpoint(ckpt));
}

TEST_CASE("cmd_train with zero steps writes the init checkpoint") {
  const fs::path dir = fresh_dir("train_zero");
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg, tiny_train_json(0).dump(2));
  std::ostringstream out;
  CHECK(cmd_train({cfg, dir / "out"}, out) == kExitOk);
  CHECK(slurp(dir / "out" / "loss.csv") == "step,loss\n");
  const ModelParams from_ckpt =
      params_from_checkpoint(load_json_file(dir / "out" / "checkpoint.json"));
  ModelConfig expect_cfg;
  expect_cfg.d = 2;
  expect_cfg.m = 2;
  expect_cfg.vocab = {"A", "B"};
  expect_cfg.k = 4;
  expect_cfg.eps = 1e-6;
  expect_cfg.seed = 5;
  const ModelParams expect = init_params(expect_cfg);
  CHECK((pack_params(from_ckpt) - pack_params(expect)).norm() == 0.0);
}

TEST_CASE("cmd_train reruns are byte-identical") {
  const fs::path dir = fresh_dir("train_repeat");
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg, tiny_train_json(3).dump(2));
  std::ostringstream out1, out2;
  CHECK(cmd_train({cfg, dir / "a"}, out1) == kExitOk);
  CHECK(cmd_train({cfg, dir / "b"}, out2) == kExitOk);
  CHECK(slurp(dir / "a" / "checkpoint.json") ==
        slurp(dir / "b" / "checkpoint.json"));
  CHECK(slurp(dir / "a" / "loss.csv") == slurp(dir / "b" / "loss.csv"));
}

TEST_CASE("cmd_train rejects malformed configs") {
  const fs::path dir = fresh_dir("train_bad");
  const fs::path cfg = dir / "config.json";
  Json j = tiny_train_json(3);
  j["typo_key"] = 1;
  write_text_file(cfg, j.dump(2));
  std::ostringstream out;
  CHECK(cmd_train({cfg, dir / "out"}, out) == kExitUsage);
  CHECK(cmd_train({dir / "missing.json", dir / "out"}, out) == kExitUsage);
}

TEST_CASE("cmd_run reproduces the training loss on the training data") {
  const fs::path dir = fresh_dir("run_roundtrip");
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg, tiny_train_json(4).dump(2));
  std::ostringstream train_out;
  REQUIRE(cmd_train({cfg, dir / "out"}, train_out) == kExitOk);
  const std::string loss_csv = slurp(dir / "out" / "loss.csv");
  const double final_loss =
      std::stod(loss_csv.substr(loss_csv.rfind("\n4,") + 3));

  write_text_file(dir / "tokens.txt", "# train data\nA\nB\nA\nB\nA\nB\n");
  std::ostringstream run_out;
  REQUIRE(cmd_run({dir / "out" / "checkpoint.json", dir / "tokens.txt",
                   dir / "run_out", std::nullopt},
                  run_out) == kExitOk);
  CHECK(std::abs(parse_reported_nll(run_out.str()) - final_loss) <= 1e-10);

  const std::string probs = slurp(dir / "run_out" / "probs.csv");
  CHECK(probs.rfind("t,A,B\n", 0) == 0);
  CHECK(slurp(dir / "run_out" / "metrics.csv")
            .rfind("t,vne_bits,purity,top_weight\n", 0) == 0);
  const std::string jsonl = slurp(dir / "run_out" / "metrics.jsonl");
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 7);  // T+1 states
  CHECK(jsonl.find("\"vne_bits\"") != std::string::npos);
}

TEST_CASE("cmd_run maps bad inputs to the documented exit codes") {
  const fs::path dir = fresh_dir("run_errors");
  const fs::path cfg = dir / "config.json";
  write_text_file(cfg, tiny_train_json(1).dump(2));
  std::ostringstream setup;
  REQUIRE(cmd_train({cfg, dir / "out"}, setup) == kExitOk);
  const fs::path ckpt = dir / "out" / "checkpoint.json";

  write_text_file(dir / "empty.txt", "# nothing here\n\n");
  std::ostringstream out_empty;
  CHECK(cmd_run({ckpt, dir / "empty.txt", dir / "r", std::nullopt},
                out_empty) == kExitUsage);

  write_text_file(dir / "unknown.txt", "A\nB\nQ\n");
  std::ostringstream out_unknown;
  CHECK(cmd_run({ckpt, dir / "unknown.txt", dir / "r", std::nullopt},
                out_unknown) == kExitFailure);
  CHECK(out_unknown.str().find("position 3") != std::string::npos);

  write_text_file(dir / "ok.txt", "A\nB\n");
  std::ostringstream out_bad_split;
  CHECK(cmd_run({ckpt, dir / "ok.txt", dir / "r", BipartiteDims{2, 2}},
                out_bad_split) == kExitUsage);  // 2x2 != d=2
}

TEST_CASE("cmd_run with bipartite dims adds the qmi column") {
  const fs::path dir = fresh_dir("run_bipartite");
  const fs::path cfg = dir / "config.json";
  Json j = tiny_train_json(1);
  j["d"] = 4;
  j["K"] = 16;
  write_text_file(cfg, j.dump(2));
  std::ostringstream setup;
  REQUIRE(cmd_train({cfg, dir / "out"}, setup) == kExitOk);
  write_text_file(dir / "tokens.txt", "A\nB\n");
  std::ostringstream out;
  REQUIRE(cmd_run({dir / "out" / "checkpoint.json", dir / "tokens.txt",
                   dir / "r", BipartiteDims{2, 2}},
                  out) == kExitOk);
  CHECK(slurp(dir / "r" / "metrics.csv")
            .rfind("t,vne_bits,purity,top_weight,qmi_bits\n", 0) == 0);
}

TEST_CASE("cmd_bench prints a parsable timing table") {
  std::ostringstream out;
  BenchOptions opt;
  opt.d_values = {1, 2};
  opt.reps = 3;
  CHECK(cmd_bench(opt, out) == kExitOk);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "d,factor_us,choi_eig_us");
  for (int expected_d : {1, 2}) {
    std::string row;
    REQUIRE(std::getline(lines, row));
    std::istringstream fields(row);
    std::string cell;
    std::getline(fields, cell, ',');
    CHECK(std::stoi(cell) == expected_d);
    std::getline(fields, cell, ',');
    CHECK(std::stod(cell) >= 0.0);
    std::getline(fields, cell, ',');
    CHECK(std::stod(cell) >= 0.0);
  }

  BenchOptions bad;
  bad.d_values = {20};
  std::ostringstream bad_out;
  CHECK(cmd_bench(bad, bad_out) == kExitUsage);
}
