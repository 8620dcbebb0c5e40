// SPDX-License-Identifier: Apache-2.0
// Subcommand implementations behind the CLI parser.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nids/run_config.hpp"

namespace nids::cli {

/// Training knobs given on the command line, applied over the config file.
struct Knobs {
  std::vector<std::pair<std::string, std::string>> values;  // (config key, text)
  std::optional<std::filesystem::path> config_file;

  RunConfig resolve() const;
};

struct PreprocessArgs {
  std::string dataset;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out;
  std::optional<std::filesystem::path> test_out;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> label_map;
  std::string label_column = "label";
  std::vector<std::string> categorical;
  std::optional<std::size_t> sample;
  std::optional<std::filesystem::path> apply;
};

struct SmoteArgs {
  std::filesystem::path data;
  std::filesystem::path out;
  std::size_t k = 5;
  std::string policy = "match-majority";
  std::uint64_t seed = 0;
};

struct TrainArgs {
  std::filesystem::path data;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> holdout;
  std::optional<std::filesystem::path> resume;
  Knobs knobs;
};

struct EvaluateArgs {
  std::filesystem::path model;
  std::filesystem::path data;
  std::optional<std::filesystem::path> out;
};

struct ExperimentArgs {
  std::filesystem::path data;
  std::filesystem::path test;
  std::optional<std::filesystem::path> out;
  std::vector<std::string> arms;
  Knobs knobs;
};

/// $NIDS_RUN_DIR, else ./runs.
std::filesystem::path default_run_dir();

void run_preprocess(const PreprocessArgs& args);
void run_smote(const SmoteArgs& args);
void run_train(const TrainArgs& args);
void run_evaluate(const EvaluateArgs& args);
void run_experiment_command(const ExperimentArgs& args);
void run_inspect(const std::filesystem::path& path);

}  // namespace nids::cli
