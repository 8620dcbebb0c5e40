// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nids/types.hpp"

namespace nids {

/// counts(t, p) = number of samples of true class t predicted as p.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_names);

  std::size_t num_classes() const { return class_names_.size(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * num_classes() + predicted]; }
  void add(std::size_t truth, std::size_t predicted) { ++counts_[truth * num_classes() + predicted]; }
  std::uint64_t total() const;
  std::uint64_t trace() const;

  /// Header row and first column carry the class names.
  std::string to_csv() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> class_names_;
  std::vector<std::uint64_t> counts_;
};

/// Throws DataError on a length mismatch or a label outside [0, C).
ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          std::size_t num_classes);
ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          const std::vector<std::string>& class_names);

/// One-vs-rest counts and rates for one class. A rate whose denominator is
/// zero is reported as 0 with its flag set.
struct ClassMetrics {
  std::string name;
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  double acc = 0.0, ppv = 0.0, tpr = 0.0, f1 = 0.0;
  bool acc_undefined = false, ppv_undefined = false, tpr_undefined = false, f1_undefined = false;
};

struct AveragedMetrics {
  double acc = 0.0, ppv = 0.0, tpr = 0.0, f1 = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> classes;
  AveragedMetrics macro;
  std::uint64_t samples = 0;
  double overall_accuracy = 0.0;  // trace / total

  std::string to_json() const;
};

/// Harmonic mean of precision and recall; 0 (and `undefined` set) when both are 0.
double f1_score(double ppv, double tpr, bool* undefined = nullptr);

MetricsReport per_class_metrics(const ConfusionMatrix& cm);

/// Unweighted mean over classes; flagged cells count as 0.
AveragedMetrics macro_average(const MetricsReport& report);

}  // namespace nids
