// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nids/loss.hpp"
#include "nids/network.hpp"
#include "nids/optim.hpp"
#include "nids/smote.hpp"

namespace nids {

enum class LossKind { kCrossEntropy, kFocal };

std::string_view to_string(LossKind kind);
/// "ce" or "focal".
LossKind parse_loss_kind(std::string_view text);

/// Every training knob. The text form is `key = value` lines whose keys are
/// the long command-line flag names, e.g. `batch-size = 256`.
struct RunConfig {
  std::size_t hidden = 64;
  std::size_t seq_len = 4;
  double dropout = 0.2;

  LossKind loss = LossKind::kFocal;
  double gamma = 2.0;
  AlphaSpec alpha;

  bool smote = false;
  std::size_t smote_k = 5;
  TargetPolicy smote_policy;

  AdamConfig adam;
  double clip_norm = 5.0;

  std::size_t batch_size = 1024;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  bool shuffle = true;

  /// Keys accepted by set(), in to_text() order.
  static const std::vector<std::string_view>& keys();

  /// Throws UsageError for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  /// Starts from the defaults; '#' begins a comment.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  /// Canonical text: every key, fixed order, shortest round-trip numbers.
  std::string to_text() const;

  /// Throws UsageError on out-of-range values.
  void validate() const;

  ModelConfig model_config(std::size_t input_dim, std::size_t num_classes) const;
  SmoteConfig smote_config() const { return {smote_k, smote_policy, seed}; }
  /// Loss settings with alpha resolved against the training histogram.
  FocalConfig focal_config(const std::vector<std::size_t>& histogram) const;
};

}  // namespace nids
