// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "nids/loss.hpp"
#include "nids/network.hpp"
#include "nids/optim.hpp"
#include "nids/rng.hpp"
#include "nids/smote.hpp"

namespace {

using namespace nids;

Matrix normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

SequenceBatch normal_batch(Rng& rng, std::size_t steps, Eigen::Index width, Eigen::Index batch) {
  SequenceBatch out;
  for (std::size_t t = 0; t < steps; ++t) out.push_back(normal_matrix(rng, width, batch));
  return out;
}

Matrix one_hot(Rng& rng, Eigen::Index batch, Eigen::Index classes) {
  Matrix y = Matrix::Zero(batch, classes);
  for (Eigen::Index b = 0; b < batch; ++b) y(b, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(classes)))) = 1.0;
  return y;
}

// KDD99-shaped model: 41 features as 4 steps of 11, 5 classes.
ModelConfig bench_config(std::size_t hidden) { return {11, hidden, 5, 4, 0.2}; }

void BM_ModelForward(benchmark::State& state) {
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  const ModelConfig cfg = bench_config(static_cast<std::size_t>(state.range(1)));
  const Model model = init_model(cfg, 1);
  Rng rng(2);
  const SequenceBatch x = normal_batch(rng, cfg.seq_len, 11, batch);
  for (auto _ : state) benchmark::DoNotOptimize(model_forward(model, x, false, nullptr).probabilities.data());
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ModelForward)->ArgsProduct({{64, 1024}, {32, 64}});

void BM_TrainStep(benchmark::State& state) {
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  const ModelConfig cfg = bench_config(static_cast<std::size_t>(state.range(1)));
  Model model = init_model(cfg, 1);
  AdamState adam = AdamState::for_model(model, {});
  const FocalConfig focal{2.0, Vector::Ones(5)};
  Rng rng(3);
  const SequenceBatch x = normal_batch(rng, cfg.seq_len, 11, batch);
  const Matrix y = one_hot(rng, batch, 5);
  for (auto _ : state) {
    Rng dropout_rng(4);
    const ForwardResult fwd = model_forward(model, x, true, &dropout_rng);
    Gradients grads = model_backward(model, *fwd.trace, cfcl_grad_logits(fwd.probabilities, y, focal));
    clip_global_norm(grads, 5.0);
    adam_step(model, grads, adam);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_TrainStep)->ArgsProduct({{64, 1024}, {32, 64}});

void BM_Cfcl(benchmark::State& state) {
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  Matrix p = normal_matrix(rng, batch, 5).array().exp();
  p = p.array().colwise() / p.rowwise().sum().array();
  const Matrix y = one_hot(rng, batch, 5);
  const FocalConfig focal{2.0, Vector::Ones(5)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfcl(p, y, focal));
    benchmark::DoNotOptimize(cfcl_grad_logits(p, y, focal).data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Cfcl)->Arg(1024)->Arg(16384);

void BM_Smote(benchmark::State& state) {
  const auto minority = static_cast<std::size_t>(state.range(0));
  const std::size_t majority = 10 * minority;
  Rng rng(6);
  FlowTable table;
  table.class_names = {"normal", "attack"};
  table.features = normal_matrix(rng, static_cast<Eigen::Index>(majority + minority), 41);
  table.labels.assign(majority, 0);
  table.labels.resize(majority + minority, 1);
  SmoteConfig cfg;
  cfg.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(smote_oversample(table, cfg).table.features.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(majority - minority));
}
BENCHMARK(BM_Smote)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
