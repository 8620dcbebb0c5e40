// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "nids/errors.hpp"
#include "nids/metrics.hpp"
#include "nids/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nids;

namespace {

// Builds a two-class matrix from explicit one-vs-rest counts for class 0.
ConfusionMatrix from_counts(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn) {
  std::vector<ClassId> truth, pred;
  auto push = [&](ClassId t, ClassId p, std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      truth.push_back(t);
      pred.push_back(p);
    }
  };
  push(0, 0, tp);
  push(0, 1, fn);
  push(1, 0, fp);
  push(1, 1, tn);
  return confusion(truth, pred, 2);
}

}  // namespace

TEST_CASE("confusion: worked examples") {
  const std::vector<ClassId> truth = {0, 0, 1}, pred = {0, 1, 1};
  const ConfusionMatrix cm = confusion(truth, pred, 2);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(1, 0) == 0);
  CHECK(cm.at(1, 1) == 1);

  const std::vector<ClassId> labels = {2, 0, 1, 2, 2, 0};
  const ConfusionMatrix perfect = confusion(labels, labels, 3);
  CHECK(perfect.at(0, 0) == 2);
  CHECK(perfect.at(1, 1) == 1);
  CHECK(perfect.at(2, 2) == 3);
  CHECK(perfect.trace() == perfect.total());

  const ConfusionMatrix empty = confusion(std::vector<ClassId>{}, std::vector<ClassId>{}, 4);
  CHECK(empty.num_classes() == 4);
  CHECK(empty.total() == 0);
  CHECK(empty == ConfusionMatrix({"0", "1", "2", "3"}));
}

TEST_CASE("confusion: errors") {
  const std::vector<ClassId> a = {0, 1}, b = {0};
  CHECK_THROWS_AS(confusion(a, b, 2), DataError);
  const std::vector<ClassId> out = {0, 2};
  CHECK_THROWS_AS(confusion(a, out, 2), DataError);
  CHECK_THROWS_AS(confusion(out, a, 2), DataError);
  const std::vector<ClassId> negative = {0, -1};
  CHECK_THROWS_AS(confusion(a, negative, 2), DataError);
}

TEST_CASE("confusion: csv layout") {
  const std::vector<ClassId> truth = {0, 1, 1}, pred = {1, 1, 0};
  const ConfusionMatrix cm = confusion(truth, pred, std::vector<std::string>{"normal", "r2l,u2r"});
  CHECK(cm.to_csv() == "true\\predicted,normal,\"r2l,u2r\"\nnormal,0,1\n\"r2l,u2r\",1,1\n");
}

TEST_CASE("f1_score: reference rows") {
  CHECK(f1_score(0.85, 1.00) == doctest::Approx(0.9189).epsilon(1e-4));
  CHECK(std::round(f1_score(0.85, 1.00) * 100.0) / 100.0 == 0.92);
  CHECK(f1_score(0.52, 0.8) == doctest::Approx(0.6303).epsilon(1e-4));
  CHECK(std::round(f1_score(0.52, 0.8) * 100.0) / 100.0 == 0.63);
  bool undefined = false;
  CHECK(f1_score(0.0, 0.0, &undefined) == 0.0);
  CHECK(undefined);
  CHECK(f1_score(0.0, 0.5, &undefined) == 0.0);
  CHECK_FALSE(undefined);
}

TEST_CASE("per_class_metrics: one of each outcome") {
  const MetricsReport r = per_class_metrics(from_counts(1, 1, 1, 1));
  const ClassMetrics& m = r.classes[0];
  CHECK(m.tp == 1);
  CHECK(m.tn == 1);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.acc == 0.5);
  CHECK(m.ppv == 0.5);
  CHECK(m.tpr == 0.5);
  CHECK(m.f1 == 0.5);
  CHECK(r.overall_accuracy == 0.5);
}

TEST_CASE("per_class_metrics: zero-division flags") {
  // Class 2 is never present and never predicted.
  const std::vector<ClassId> truth = {0, 1, 1, 0}, pred = {0, 1, 0, 0};
  const MetricsReport r = per_class_metrics(confusion(truth, pred, 3));
  const ClassMetrics& absent = r.classes[2];
  CHECK(absent.ppv_undefined);
  CHECK(absent.tpr_undefined);
  CHECK(absent.f1_undefined);
  CHECK(absent.ppv == 0.0);
  CHECK(absent.tpr == 0.0);
  CHECK(absent.f1 == 0.0);
  // Every sample is a true negative for it, so one-vs-rest accuracy is defined.
  CHECK_FALSE(absent.acc_undefined);
  CHECK(absent.acc == 1.0);
  CHECK_FALSE(r.classes[0].ppv_undefined);

  const MetricsReport empty = per_class_metrics(ConfusionMatrix({"a", "b"}));
  for (const auto& m : empty.classes) {
    CHECK(m.acc_undefined);
    CHECK(m.ppv_undefined);
    CHECK(m.tpr_undefined);
    CHECK(m.f1_undefined);
    CHECK(m.acc == 0.0);
    CHECK(m.f1 == 0.0);
  }
  CHECK(empty.macro.acc == 0.0);
}

TEST_CASE("macro_average") {
  MetricsReport r;
  for (double ppv : {1.0, 0.74, 0.52}) {
    ClassMetrics m;
    m.ppv = ppv;
    m.acc = m.tpr = m.f1 = 0.6;
    r.classes.push_back(m);
  }
  const AveragedMetrics avg = macro_average(r);
  CHECK(avg.ppv == doctest::Approx(0.7533).epsilon(1e-4));
  CHECK(avg.acc == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(avg.f1 == doctest::Approx(0.6).epsilon(1e-15));

  r.classes.resize(1);
  const AveragedMetrics single = macro_average(r);
  CHECK(single.ppv == 1.0);
  CHECK(single.tpr == 0.6);

  ClassMetrics flagged;
  flagged.ppv_undefined = true;
  r.classes.push_back(flagged);
  CHECK(macro_average(r).ppv == 0.5);
  CHECK(macro_average(MetricsReport{}).ppv == 0.0);
}

TEST_CASE("per_class_metrics matches a per-sample oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t classes = 2 + rng.index(9);
    const std::size_t n = rng.index(1001);
    std::vector<ClassId> truth = test::random_labels(rng, n, classes);
    std::vector<ClassId> pred = test::random_labels(rng, n, classes);
    // Bias toward correct predictions so every regime shows up.
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform() < 0.5) pred[i] = truth[i];
    const MetricsReport r = per_class_metrics(confusion(truth, pred, classes));
    REQUIRE(test::metrics_oracle_mismatch(r, truth, pred, classes) == "");

    std::uint64_t tp_sum = 0, support = 0;
    for (const ClassMetrics& m : r.classes) {
      for (double v : {m.acc, m.ppv, m.tpr, m.f1}) REQUIRE((v >= 0.0 && v <= 1.0));
      tp_sum += m.tp;
      support += m.tp + m.fn;
    }
    CHECK(tp_sum == confusion(truth, pred, classes).trace());
    CHECK(support == n);
  }
}

TEST_CASE("per_class_metrics: relabeling permutes classes") {
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t classes = 2 + rng.index(9);
    const std::size_t n = 1 + rng.index(500);
    const std::vector<ClassId> truth = test::random_labels(rng, n, classes);
    const std::vector<ClassId> pred = test::random_labels(rng, n, classes);
    std::vector<ClassId> perm(classes);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<ClassId>(perm));
    std::vector<ClassId> truth2(n), pred2(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth2[i] = perm[static_cast<std::size_t>(truth[i])];
      pred2[i] = perm[static_cast<std::size_t>(pred[i])];
    }
    const MetricsReport a = per_class_metrics(confusion(truth, pred, classes));
    const MetricsReport b = per_class_metrics(confusion(truth2, pred2, classes));
    for (std::size_t k = 0; k < classes; ++k) {
      const ClassMetrics& x = a.classes[k];
      const ClassMetrics& y = b.classes[static_cast<std::size_t>(perm[k])];
      REQUIRE(x.tp == y.tp);
      REQUIRE(x.fp == y.fp);
      REQUIRE(x.fn == y.fn);
      REQUIRE(x.f1 == y.f1);
    }
    CHECK(a.macro.acc == doctest::Approx(b.macro.acc).epsilon(1e-14));
    CHECK(a.macro.ppv == doctest::Approx(b.macro.ppv).epsilon(1e-14));
    CHECK(a.macro.tpr == doctest::Approx(b.macro.tpr).epsilon(1e-14));
    CHECK(a.macro.f1 == doctest::Approx(b.macro.f1).epsilon(1e-14));
  }
}

TEST_CASE("MetricsReport::to_json") {
  const std::vector<ClassId> truth = {0, 0, 1, 2}, pred = {0, 1, 1, 1};
  const MetricsReport r = per_class_metrics(confusion(truth, pred, std::vector<std::string>{"normal", "dos", "u2r"}));
  const std::string text = r.to_json();
  CHECK(text.back() == '\n');
  const auto j = nlohmann::json::parse(text);
  CHECK(j["samples"] == 4);
  CHECK(j["overall_accuracy"].get<double>() == 0.5);
  REQUIRE(j["classes"].size() == 3);
  CHECK(j["classes"][1]["name"] == "dos");
  CHECK(j["classes"][1]["ppv"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(j["classes"][2]["undefined"]["ppv"] == true);
  CHECK(j["classes"][2]["undefined"]["tpr"] == false);
  CHECK(j["macro"]["f1"].get<double>() == doctest::Approx(r.macro.f1));
}
