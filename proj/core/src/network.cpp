// SPDX-License-Identifier: Apache-2.0
#include "nids/network.hpp"

#include <cmath>
#include <sstream>

#include "nids/errors.hpp"

namespace nids {

namespace {

Matrix sigmoid(const Matrix& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

Matrix affine(const Matrix& w, const Vector& b, const Matrix& z) {
  Matrix out = w * z;
  out.colwise() += b;
  return out;
}

std::string parameter_diagnostics(const LstmParams& p) {
  std::ostringstream os;
  os << "max|W_f|=" << p.w_forget.cwiseAbs().maxCoeff() << " max|W_i|=" << p.w_input.cwiseAbs().maxCoeff()
     << " max|W_C|=" << p.w_candidate.cwiseAbs().maxCoeff() << " max|W_o|=" << p.w_output.cwiseAbs().maxCoeff()
     << " finite=" << (p.w_forget.allFinite() && p.w_input.allFinite() && p.w_candidate.allFinite() &&
                       p.w_output.allFinite() && p.b_forget.allFinite() && p.b_input.allFinite() &&
                       p.b_candidate.allFinite() && p.b_output.allFinite());
  return os.str();
}

void fill_uniform(Matrix& m, double limit, Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim < 1 || hidden_dim < 1 || num_classes < 1 || seq_len < 1) {
    throw UsageError("model dimensions must all be at least 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
}

LstmParams LstmParams::zeros(std::size_t hidden, std::size_t input) {
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto z = static_cast<Eigen::Index>(hidden + input);
  return {Matrix::Zero(h, z), Matrix::Zero(h, z), Matrix::Zero(h, z), Matrix::Zero(h, z),
          Vector::Zero(h),    Vector::Zero(h),    Vector::Zero(h),    Vector::Zero(h)};
}

DenseParams DenseParams::zeros(std::size_t classes, std::size_t hidden) {
  return {Matrix::Zero(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(hidden)),
          Vector::Zero(static_cast<Eigen::Index>(classes))};
}

std::array<std::span<double>, kNumTensors> tensor_views(LstmParams& l, DenseParams& d) {
  auto view = [](auto& t) { return std::span<double>(t.data(), static_cast<std::size_t>(t.size())); };
  return {view(l.w_forget), view(l.w_input), view(l.w_candidate), view(l.w_output), view(l.b_forget),
          view(l.b_input),  view(l.b_candidate), view(l.b_output), view(d.weight),   view(d.bias)};
}

std::array<std::span<const double>, kNumTensors> tensor_views(const LstmParams& l, const DenseParams& d) {
  auto view = [](const auto& t) { return std::span<const double>(t.data(), static_cast<std::size_t>(t.size())); };
  return {view(l.w_forget), view(l.w_input), view(l.w_candidate), view(l.w_output), view(l.b_forget),
          view(l.b_input),  view(l.b_candidate), view(l.b_output), view(d.weight),   view(d.bias)};
}

std::array<std::pair<Eigen::Index, Eigen::Index>, kNumTensors> tensor_shapes(const LstmParams& l,
                                                                             const DenseParams& d) {
  auto shape = [](const auto& t) { return std::pair<Eigen::Index, Eigen::Index>(t.rows(), t.cols()); };
  return {shape(l.w_forget), shape(l.w_input), shape(l.w_candidate), shape(l.w_output), shape(l.b_forget),
          shape(l.b_input),  shape(l.b_candidate), shape(l.b_output), shape(d.weight),   shape(d.bias)};
}

double Gradients::squared_norm() const {
  double total = 0.0;
  for (const auto view : tensor_views(lstm, dense))
    for (double v : view) total += v * v;
  return total;
}

void Gradients::scale(double factor) {
  for (auto view : tensor_views(lstm, dense))
    for (double& v : view) v *= factor;
}

LstmState LstmState::zeros(std::size_t hidden, std::size_t batch) {
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto b = static_cast<Eigen::Index>(batch);
  return {Matrix::Zero(h, b), Matrix::Zero(h, b)};
}

std::pair<LstmState, CellCache> lstm_cell(const LstmParams& params, const LstmState& state, const Matrix& x) {
  const Eigen::Index hidden = params.hidden_dim();
  const Eigen::Index input = params.input_dim();
  const Eigen::Index batch = x.cols();
  if (x.rows() != input || state.h.rows() != hidden || state.c.rows() != hidden || state.h.cols() != batch ||
      state.c.cols() != batch) {
    throw DataError("lstm_cell shape mismatch: x is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    ", state is " + std::to_string(state.h.rows()) + "x" + std::to_string(state.h.cols()) +
                    ", params expect input " + std::to_string(input) + " and hidden " + std::to_string(hidden));
  }

  CellCache cache;
  cache.input.resize(hidden + input, batch);
  cache.input.topRows(hidden) = state.h;
  cache.input.bottomRows(input) = x;

  cache.forget = sigmoid(affine(params.w_forget, params.b_forget, cache.input));
  cache.input_gate = sigmoid(affine(params.w_input, params.b_input, cache.input));
  cache.candidate = affine(params.w_candidate, params.b_candidate, cache.input).array().tanh().matrix();
  cache.output = sigmoid(affine(params.w_output, params.b_output, cache.input));
  cache.cell_prev = state.c;
  cache.cell = cache.forget.cwiseProduct(state.c) + cache.input_gate.cwiseProduct(cache.candidate);
  cache.tanh_cell = cache.cell.array().tanh().matrix();
  cache.hidden = cache.output.cwiseProduct(cache.tanh_cell);

  if (!cache.cell.allFinite() || !cache.hidden.allFinite()) {
    throw NumericError("LSTM cell produced non-finite state (" + parameter_diagnostics(params) +
                       ", input finite=" + (x.allFinite() ? "true" : "false") + ")");
  }
  LstmState next{cache.hidden, cache.cell};
  return {std::move(next), std::move(cache)};
}

std::pair<Matrix, ForwardTrace> lstm_forward(const LstmParams& params, std::span<const Matrix> sequence) {
  if (sequence.empty()) throw DataError("lstm_forward needs at least one timestep");
  ForwardTrace trace;
  trace.steps.reserve(sequence.size());
  LstmState state = LstmState::zeros(static_cast<std::size_t>(params.hidden_dim()),
                                     static_cast<std::size_t>(sequence.front().cols()));
  for (const Matrix& x : sequence) {
    auto [next, cache] = lstm_cell(params, state, x);
    state = std::move(next);
    trace.steps.push_back(std::move(cache));
  }
  return {std::move(state.h), std::move(trace)};
}

DropoutResult dropout(const Matrix& h, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  if (!training || p == 0.0) return {h, Matrix::Ones(h.rows(), h.cols())};
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(h.rows(), h.cols());
  // Column-major draw order: sample by sample, unit by unit.
  for (Eigen::Index c = 0; c < h.cols(); ++c)
    for (Eigen::Index r = 0; r < h.rows(); ++r) mask(r, c) = rng.uniform() < p ? 0.0 : keep_scale;
  return {h.cwiseProduct(mask), std::move(mask)};
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - m).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

Matrix dense_softmax(const DenseParams& dense, const Matrix& h) { return softmax_columns(affine(dense.weight, dense.bias, h)); }

SequenceBatch gather_batch(const SequenceSet& sequences, std::span<const std::size_t> rows) {
  const auto width = static_cast<Eigen::Index>(sequences.width);
  const auto batch = static_cast<Eigen::Index>(rows.size());
  SequenceBatch out(sequences.steps, Matrix(width, batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto row = sequences.data.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(b)]));
    for (std::size_t t = 0; t < sequences.steps; ++t) {
      out[t].col(b) = row.segment(static_cast<Eigen::Index>(t) * width, width).transpose();
    }
  }
  return out;
}

ForwardResult model_forward(const Model& model, const SequenceBatch& batch, bool training, Rng* rng) {
  const ModelConfig& cfg = model.config;
  if (batch.size() != cfg.seq_len) {
    throw DataError("batch has " + std::to_string(batch.size()) + " timesteps, model expects " +
                    std::to_string(cfg.seq_len));
  }
  for (const Matrix& x : batch) {
    if (static_cast<std::size_t>(x.rows()) != cfg.input_dim || x.cols() != batch.front().cols()) {
      throw DataError("batch timestep is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                      ", model expects input width " + std::to_string(cfg.input_dim));
    }
  }
  const bool needs_rng = training && cfg.dropout > 0.0;
  if (needs_rng && rng == nullptr) throw UsageError("training-mode forward with dropout needs an RNG");

  auto [h_last, trace] = lstm_forward(model.lstm, batch);
  Rng unused(0);
  DropoutResult dropped = dropout(h_last, cfg.dropout, training, needs_rng ? *rng : unused);
  Matrix logits = affine(model.dense.weight, model.dense.bias, dropped.output);

  ForwardResult result;
  result.probabilities = softmax_columns(logits).transpose();
  if (training) {
    trace.dropout_mask = std::move(dropped.mask);
    trace.dropped_hidden = std::move(dropped.output);
    trace.logits = std::move(logits);
    result.trace = std::move(trace);
  }
  return result;
}

Gradients model_backward(const Model& model, const ForwardTrace& trace, const Matrix& dlogits) {
  if (trace.steps.empty() || trace.logits.size() == 0) {
    throw UsageError("model_backward needs the trace of a training-mode forward pass");
  }
  const Eigen::Index hidden = model.lstm.hidden_dim();
  const Eigen::Index batch = trace.logits.cols();
  if (dlogits.rows() != batch || dlogits.cols() != trace.logits.rows()) {
    throw DataError("dlogits shape does not match the forward trace");
  }

  Gradients g{LstmParams::zeros(static_cast<std::size_t>(hidden), static_cast<std::size_t>(model.lstm.input_dim())),
              DenseParams::zeros(static_cast<std::size_t>(model.dense.weight.rows()),
                                 static_cast<std::size_t>(hidden))};

  const Matrix d_logits = dlogits.transpose();  // classes x batch
  g.dense.weight = d_logits * trace.dropped_hidden.transpose();
  g.dense.bias = d_logits.rowwise().sum();

  Matrix dh = (model.dense.weight.transpose() * d_logits).cwiseProduct(trace.dropout_mask);
  Matrix dc = Matrix::Zero(hidden, batch);

  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    const CellCache& s = *it;

    const Matrix d_output = dh.cwiseProduct(s.tanh_cell);
    dc += (dh.array() * s.output.array() * (1.0 - s.tanh_cell.array().square())).matrix();

    const Matrix dz_forget = (dc.array() * s.cell_prev.array() * s.forget.array() * (1.0 - s.forget.array())).matrix();
    const Matrix dz_input =
        (dc.array() * s.candidate.array() * s.input_gate.array() * (1.0 - s.input_gate.array())).matrix();
    const Matrix dz_candidate =
        (dc.array() * s.input_gate.array() * (1.0 - s.candidate.array().square())).matrix();
    const Matrix dz_output = (d_output.array() * s.output.array() * (1.0 - s.output.array())).matrix();

    g.lstm.w_forget.noalias() += dz_forget * s.input.transpose();
    g.lstm.w_input.noalias() += dz_input * s.input.transpose();
    g.lstm.w_candidate.noalias() += dz_candidate * s.input.transpose();
    g.lstm.w_output.noalias() += dz_output * s.input.transpose();
    g.lstm.b_forget += dz_forget.rowwise().sum();
    g.lstm.b_input += dz_input.rowwise().sum();
    g.lstm.b_candidate += dz_candidate.rowwise().sum();
    g.lstm.b_output += dz_output.rowwise().sum();

    Matrix dz = model.lstm.w_forget.transpose() * dz_forget;
    dz.noalias() += model.lstm.w_input.transpose() * dz_input;
    dz.noalias() += model.lstm.w_candidate.transpose() * dz_candidate;
    dz.noalias() += model.lstm.w_output.transpose() * dz_output;

    dh = dz.topRows(hidden);
    dc = dc.cwiseProduct(s.forget);
  }
  return g;
}

Model init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Model m{config, LstmParams::zeros(config.hidden_dim, config.input_dim),
          DenseParams::zeros(config.num_classes, config.hidden_dim)};
  Rng rng(seed, Stream::kInit);
  const double gate_limit =
      std::sqrt(6.0 / static_cast<double>(config.hidden_dim + config.input_dim + config.hidden_dim));
  fill_uniform(m.lstm.w_forget, gate_limit, rng);
  fill_uniform(m.lstm.w_input, gate_limit, rng);
  fill_uniform(m.lstm.w_candidate, gate_limit, rng);
  fill_uniform(m.lstm.w_output, gate_limit, rng);
  fill_uniform(m.dense.weight, std::sqrt(6.0 / static_cast<double>(config.hidden_dim + config.num_classes)), rng);
  m.lstm.b_forget.setOnes();
  return m;
}

std::vector<ClassId> argmax_rows(const Matrix& probabilities) {
  std::vector<ClassId> out(static_cast<std::size_t>(probabilities.rows()));
  for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probabilities.cols(); ++c) {
      if (probabilities(r, c) > probabilities(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<ClassId>(best);
  }
  return out;
}

}  // namespace nids
