// SPDX-License-Identifier: Apache-2.0
#include "nids/metrics.hpp"

#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nids/errors.hpp"

namespace nids {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : class_names_(std::move(class_names)), counts_(class_names_.size() * class_names_.size(), 0) {}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t k = 0; k < num_classes(); ++k) t += at(k, k);
  return t;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream os;
  os << "true\\predicted";
  for (const auto& name : class_names_) os << ',' << csv_field(name);
  os << '\n';
  for (std::size_t t = 0; t < num_classes(); ++t) {
    os << csv_field(class_names_[t]);
    for (std::size_t p = 0; p < num_classes(); ++p) os << ',' << at(t, p);
    os << '\n';
  }
  return os.str();
}

ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          const std::vector<std::string>& class_names) {
  if (truth.size() != predicted.size()) {
    throw DataError("confusion: " + std::to_string(truth.size()) + " true labels but " +
                    std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix cm(class_names);
  const auto c = static_cast<ClassId>(class_names.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= c || predicted[i] < 0 || predicted[i] >= c) {
      throw DataError("confusion: label out of range at sample " + std::to_string(i));
    }
    cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

ConfusionMatrix confusion(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                          std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < num_classes; ++k) names.push_back(std::to_string(k));
  return confusion(truth, predicted, names);
}

double f1_score(double ppv, double tpr, bool* undefined) {
  const double den = ppv + tpr;
  if (undefined) *undefined = den == 0.0;
  return den == 0.0 ? 0.0 : 2.0 * ppv * tpr / den;
}

MetricsReport per_class_metrics(const ConfusionMatrix& cm) {
  MetricsReport report;
  const std::size_t c = cm.num_classes();
  report.samples = cm.total();
  bool unused = false;
  report.overall_accuracy = ratio(cm.trace(), report.samples, unused);

  for (std::size_t k = 0; k < c; ++k) {
    ClassMetrics m;
    m.name = cm.class_names()[k];
    m.tp = cm.at(k, k);
    for (std::size_t j = 0; j < c; ++j) {
      if (j == k) continue;
      m.fp += cm.at(j, k);
      m.fn += cm.at(k, j);
    }
    m.tn = report.samples - m.tp - m.fp - m.fn;
    m.acc = ratio(m.tp + m.tn, report.samples, m.acc_undefined);
    m.ppv = ratio(m.tp, m.tp + m.fp, m.ppv_undefined);
    m.tpr = ratio(m.tp, m.tp + m.fn, m.tpr_undefined);
    m.f1 = f1_score(m.ppv, m.tpr, &m.f1_undefined);
    report.classes.push_back(std::move(m));
  }
  report.macro = macro_average(report);
  return report;
}

AveragedMetrics macro_average(const MetricsReport& report) {
  AveragedMetrics avg;
  if (report.classes.empty()) return avg;
  for (const auto& m : report.classes) {
    avg.acc += m.acc;
    avg.ppv += m.ppv;
    avg.tpr += m.tpr;
    avg.f1 += m.f1;
  }
  const auto n = static_cast<double>(report.classes.size());
  avg.acc /= n;
  avg.ppv /= n;
  avg.tpr /= n;
  avg.f1 /= n;
  return avg;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["samples"] = samples;
  j["overall_accuracy"] = overall_accuracy;
  auto& classes_json = j["classes"] = nlohmann::ordered_json::array();
  for (const auto& m : classes) {
    nlohmann::ordered_json cj;
    cj["name"] = m.name;
    cj["tp"] = m.tp;
    cj["tn"] = m.tn;
    cj["fp"] = m.fp;
    cj["fn"] = m.fn;
    cj["acc"] = m.acc;
    cj["ppv"] = m.ppv;
    cj["tpr"] = m.tpr;
    cj["f1"] = m.f1;
    cj["undefined"] = {{"acc", m.acc_undefined}, {"ppv", m.ppv_undefined}, {"tpr", m.tpr_undefined},
                       {"f1", m.f1_undefined}};
    classes_json.push_back(std::move(cj));
  }
  j["macro"] = {{"acc", macro.acc}, {"ppv", macro.ppv}, {"tpr", macro.tpr}, {"f1", macro.f1}};
  return j.dump(2) + "\n";
}

}  // namespace nids
