// SPDX-License-Identifier: Apache-2.0
// Runs the nids binary as a subprocess and checks its files and exit codes.
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nids::test::read_file;
using nids::test::TempDir;
using nids::test::write_file;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run cli(const std::string& args, const TempDir& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "cd " + quote(dir.path().string()) + " && " + quote(NIDS_CLI_PATH) + " " + args + " >" +
                          quote(out.string()) + " 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

void write_flows(const fs::path& path, std::size_t rows, std::uint64_t seed) {
  write_file(path, nids::test::synthetic_flow_csv(rows, seed));
}

std::map<std::string, std::string> histogram_lines(const std::string& text, const std::regex& pattern) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_match(line, m, pattern)) out[m[1]] = m[2];
  }
  return out;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

const char* kTrainFlags = "--epochs 2 --hidden 6 --batch-size 64";

}  // namespace

TEST_CASE("cli: help matches the golden file") {
  TempDir dir;
  const Run r = cli("--help", dir);
  CHECK(r.code == 0);
  CHECK(r.out == read_file(fs::path(NIDS_GOLDEN_DIR) / "help.txt"));
  for (const char* flag : {"--dataset", "--input", "--test-out", "--label-map", "--smote-k", "--smote-policy",
                           "--holdout", "--resume", "--config", "--gamma", "--alpha", "--clip-norm", "--arms",
                           "--no-shuffle", "--no-smote", "--model", "--apply", "--sample"}) {
    CHECK(contains(r.out, flag));
  }
  CHECK(cli("train --help", dir).code == 0);
}

TEST_CASE("cli: usage errors exit 1") {
  TempDir dir;
  CHECK(cli("", dir).code == 1);
  CHECK(cli("frobnicate", dir).code == 1);
  CHECK(cli("inspect", dir).code == 1);
  CHECK(cli("train --data missing.bin", dir).code == 1);
  write_flows(dir / "flows.csv", 50, 1);
  const Run bad_kind = cli("preprocess --dataset netflow --input flows.csv --categorical proto --out d.bin", dir);
  CHECK(bad_kind.code == 1);
  CHECK_FALSE(bad_kind.err.empty());
  CHECK(bad_kind.out.empty());
  CHECK(cli("preprocess --dataset generic --input flows.csv --categorical proto --out d.bin --bogus", dir).code == 1);
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out d.bin", dir).code == 0);
  CHECK(cli("train --data d.bin --epochs abc", dir).code == 1);
  CHECK(cli("train --data d.bin --epochs 0", dir).code == 1);
  CHECK(cli("train --data d.bin --smote --no-smote", dir).code == 1);
  CHECK(cli("experiment --data d.bin --test d.bin --arms smote_magic", dir).code == 1);
}

TEST_CASE("cli: data errors exit 2") {
  TempDir dir;
  write_file(dir / "junk.bin", "definitely not a container");
  const Run junk = cli("inspect junk.bin", dir);
  CHECK(junk.code == 2);
  CHECK(contains(junk.err, "magic"));
  write_file(dir / "bad.csv", "a,b,label\n1,2,x\n");
  CHECK(cli("preprocess --dataset generic --input bad.csv --label-column nope --out d.bin", dir).code == 2);
  CHECK(cli("preprocess --dataset cicids2017 --input bad.csv --out d.bin", dir).code == 2);
}

TEST_CASE("cli: preprocess, train, evaluate and inspect") {
  TempDir dir;
  write_flows(dir / "flows.csv", 400, 2);
  const Run pre =
      cli("preprocess --dataset generic --input flows.csv --categorical proto --out train.bin --test-out test.bin", dir);
  REQUIRE(pre.code == 0);
  CHECK(pre.out.empty());

  // The class histogram printed by preprocess matches what inspect reads back.
  const auto printed = histogram_lines(pre.err.substr(0, pre.err.find("written test.bin")),
                                       std::regex(R"(  (\w+): (\d+))"));
  const Run inspect = cli("inspect train.bin", dir);
  REQUIRE(inspect.code == 0);
  const auto stored = histogram_lines(inspect.out, std::regex(R"(  \d+ (\w+): (\d+))"));
  CHECK(printed.size() == 3);
  CHECK(printed == stored);

  const Run tr = cli(std::string("train --data train.bin --out run --loss focal --gamma 2 --smote ") + kTrainFlags, dir);
  REQUIRE(tr.code == 0);
  CHECK(tr.out.empty());
  for (const char* f : {"checkpoint.bin", "history.csv", "manifest.json"}) CHECK(fs::exists(dir / "run" / f));
  const std::string history = read_file(dir / "run" / "history.csv");
  CHECK(history.starts_with("epoch,loss,accuracy\n1,"));

  const auto manifest = nlohmann::json::parse(read_file(dir / "run" / "manifest.json"));
  CHECK(manifest["inputs"][0]["path"] == "train.bin");
  CHECK(contains(manifest["config"].get<std::string>(), "smote = true"));

  const Run ck = cli("inspect run/checkpoint.bin", dir);
  REQUIRE(ck.code == 0);
  int tensors = 0;
  for (const char* name : {"lstm.w_forget", "lstm.w_input", "lstm.w_candidate", "lstm.w_output", "lstm.b_forget",
                           "lstm.b_input", "lstm.b_candidate", "lstm.b_output", "dense.weight", "dense.bias"}) {
    tensors += contains(ck.out, std::string("  ") + name + " ") ? 1 : 0;
  }
  CHECK(tensors == 10);

  const Run ev = cli("evaluate --model run/checkpoint.bin --data test.bin --out eval", dir);
  REQUIRE(ev.code == 0);
  const auto metrics = nlohmann::json::parse(read_file(dir / "eval" / "metrics.json"));
  REQUIRE(metrics["classes"].size() == 3);
  for (const auto& c : metrics["classes"]) {
    const double ppv = c["ppv"], tpr = c["tpr"], f1 = c["f1"];
    if (ppv + tpr > 0.0) CHECK(f1 == doctest::Approx(2.0 * ppv * tpr / (ppv + tpr)).epsilon(1e-12));
  }
  const std::string csv = read_file(dir / "eval" / "confusion.csv");
  CHECK(csv.starts_with("true\\predicted,benign,dos,probe\n"));

  // Scoring a container fitted separately is refused.
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out other.bin --seed 5", dir)
              .code == 0);
  CHECK(cli("evaluate --model run/checkpoint.bin --data other.bin", dir).code == 2);
  // Unless it was produced with the training container's preprocessing.
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --apply train.bin --out applied.bin",
               dir)
              .code == 0);
  CHECK(cli("evaluate --model run/checkpoint.bin --data applied.bin --out eval2", dir).code == 0);

  // Truncated checkpoints are reported with the failing offset.
  const std::string bytes = read_file(dir / "run" / "checkpoint.bin");
  write_file(dir / "short.bin", bytes.substr(0, bytes.size() / 3));
  const Run trunc = cli("inspect short.bin", dir);
  CHECK(trunc.code == 2);
  CHECK(contains(trunc.err, "offset"));

  // Inspect never touches its input.
  CHECK(read_file(dir / "run" / "checkpoint.bin") == bytes);
}

TEST_CASE("cli: smote and resume") {
  TempDir dir;
  write_flows(dir / "flows.csv", 300, 3);
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out d.bin", dir).code == 0);
  const Run sm = cli("smote --data d.bin --out d_smote.bin", dir);
  REQUIRE(sm.code == 0);
  const auto hist = histogram_lines(cli("inspect d_smote.bin", dir).out, std::regex(R"(  \d+ (\w+): (\d+))"));
  REQUIRE(hist.size() == 3);
  CHECK(hist.at("benign") == hist.at("dos"));
  CHECK(hist.at("benign") == hist.at("probe"));

  REQUIRE(cli(std::string("train --data d.bin --out full --seed 3 ") + kTrainFlags, dir).code == 0);
  REQUIRE(cli("train --data d.bin --out part --seed 3 --epochs 1 --hidden 6 --batch-size 64", dir).code == 0);
  REQUIRE(cli(std::string("train --data d.bin --out resumed --seed 3 --resume part/checkpoint.bin ") + kTrainFlags,
               dir)
              .code == 0);
  CHECK(read_file(dir / "resumed" / "checkpoint.bin") == read_file(dir / "full" / "checkpoint.bin"));
}

TEST_CASE("cli: config file and overrides") {
  TempDir dir;
  write_flows(dir / "flows.csv", 200, 4);
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out d.bin", dir).code == 0);
  write_file(dir / "run.cfg", "hidden = 5\nepochs = 1\nbatch-size = 32\nloss = ce\n");
  REQUIRE(cli("train --data d.bin --out r --config run.cfg --epochs 2", dir).code == 0);
  const std::string text = read_file(dir / "r" / "manifest.json");
  const auto cfg = nlohmann::json::parse(text)["config"].get<std::string>();
  CHECK(contains(cfg, "hidden = 5\n"));
  CHECK(contains(cfg, "epochs = 2\n"));
  CHECK(contains(cfg, "loss = ce\n"));
  write_file(dir / "bad.cfg", "hidden = 5\nwat = 1\n");
  const Run bad = cli("train --data d.bin --config bad.cfg", dir);
  CHECK(bad.code == 1);
  CHECK(contains(bad.err, "line 2"));
}

TEST_CASE("cli: default run directory") {
  TempDir dir;
  write_flows(dir / "flows.csv", 200, 5);
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out d.bin", dir).code == 0);
  REQUIRE(cli("train --data d.bin --epochs 1 --hidden 4", dir).code == 0);
  CHECK(fs::exists(dir / "runs" / "checkpoint.bin"));
  const std::string env_cmd = "train --data d.bin --epochs 1 --hidden 4";
  const fs::path out = dir / "env.txt";
  const std::string cmd = "cd " + quote(dir.path().string()) + " && NIDS_RUN_DIR=elsewhere " + quote(NIDS_CLI_PATH) +
                          " " + env_cmd + " 2>" + quote(out.string());
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "elsewhere" / "checkpoint.bin"));
}

TEST_CASE("cli: experiment is reproducible") {
  TempDir dir;
  write_flows(dir / "flows.csv", 300, 6);
  REQUIRE(cli("preprocess --dataset generic --input flows.csv --categorical proto --out tr.bin --test-out te.bin", dir).code == 0);
  const std::string flags = std::string(" --arms nosmote_ce,smote_focal ") + kTrainFlags;
  REQUIRE(cli("experiment --data tr.bin --test te.bin --out a" + flags, dir).code == 0);
  REQUIRE(cli("experiment --data tr.bin --test te.bin --out b" + flags, dir).code == 0);
  for (const char* f : {"checkpoint_nosmote_ce.bin", "history_nosmote_ce.csv", "metrics_nosmote_ce.json",
                        "confusion_nosmote_ce.csv", "checkpoint_smote_focal.bin", "metrics_smote_focal.json",
                        "manifest.json"}) {
    INFO(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  CHECK_FALSE(fs::exists(dir / "a" / "checkpoint_smote_ce.bin"));
}
