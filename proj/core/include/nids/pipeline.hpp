// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nids/checkpoint.hpp"
#include "nids/dataset.hpp"
#include "nids/metrics.hpp"
#include "nids/run_config.hpp"

namespace nids {

using LogFn = std::function<void(std::string_view)>;

struct TrainOptions {
  const Dataset* holdout = nullptr;  // adds held-out loss/accuracy to the history
  const Checkpoint* resume = nullptr;  // continue from its weights and optimizer state
  LogFn log;
};

struct TrainResult {
  Checkpoint checkpoint;  // carries the history and the optimizer state
  std::vector<std::string> warnings;
  std::uint64_t optimizer_steps = 0;  // taken by this call
};

/// Trains on an already-standardized training set: optional SMOTE, alpha from
/// the (post-SMOTE) histogram, windowize, then for each epoch a reshuffle from
/// stream (seed, epoch) and mini-batches of forward, loss, backward, global
/// norm clipping and an Adam step. The final short batch is kept.
/// Throws NumericError naming the epoch and batch on a non-finite loss.
TrainResult train(const RunConfig& config, const Dataset& data, const TrainOptions& options = {});

/// Inference-mode class probabilities, rows x classes.
Matrix predict_proba(const Model& model, const FlowTable& table);

struct Evaluation {
  ConfusionMatrix confusion;
  MetricsReport report;
  std::vector<ClassId> predictions;
};

/// Scores a dataset with a checkpoint. Throws DataError when the dataset's
/// classes or preprocessing differ from those stored in the checkpoint.
Evaluation evaluate(const Checkpoint& checkpoint, const Dataset& data);

enum class Arm { kNoSmoteCe, kSmoteCe, kSmoteFocal };

std::string_view to_string(Arm arm);
/// "nosmote_ce", "smote_ce" or "smote_focal".
Arm parse_arm(std::string_view text);
inline constexpr Arm kAllArms[] = {Arm::kNoSmoteCe, Arm::kSmoteCe, Arm::kSmoteFocal};

/// The base configuration with the arm's SMOTE switch and loss applied.
RunConfig arm_config(const RunConfig& base, Arm arm);

struct ArmResult {
  Arm arm;
  TrainResult training;
  Evaluation evaluation;
};

/// Trains and evaluates each arm on the same split with the same seed.
std::vector<ArmResult> run_experiment(const RunConfig& base, const Dataset& train_data, const Dataset& test_data,
                                      std::span<const Arm> arms, const LogFn& log = {});

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes checkpoint_<tag>.bin and history_<tag>.csv, plus metrics_<tag>.json
/// and confusion_<tag>.csv when an evaluation is given. An empty tag drops the
/// suffix. Returns the file names written.
std::vector<std::string> write_run_files(const std::filesystem::path& dir, std::string_view tag,
                                         const Checkpoint& checkpoint, const Evaluation* evaluation);

/// manifest.json: config text hash, input file hashes and output file hashes.
void write_manifest(const std::filesystem::path& dir, const RunConfig& config,
                    std::span<const std::filesystem::path> inputs, std::span<const std::string> outputs);

}  // namespace nids
