// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "nids/features.hpp"
#include "nids/rng.hpp"
#include "nids/types.hpp"

namespace nids {

struct ModelConfig {
  std::size_t input_dim = 1;  // per-timestep width
  std::size_t hidden_dim = 64;
  std::size_t num_classes = 2;
  std::size_t seq_len = 4;
  double dropout = 0.2;

  /// Throws UsageError unless all dims are >= 1 and 0 <= dropout < 1.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Gate weights act on the concatenation [h_prev; x], so each matrix is
/// hidden x (hidden + input).
struct LstmParams {
  Matrix w_forget, w_input, w_candidate, w_output;
  Vector b_forget, b_input, b_candidate, b_output;

  static LstmParams zeros(std::size_t hidden, std::size_t input);
  Eigen::Index hidden_dim() const { return w_forget.rows(); }
  Eigen::Index input_dim() const { return w_forget.cols() - w_forget.rows(); }
};

struct DenseParams {
  Matrix weight;  // classes x hidden
  Vector bias;

  static DenseParams zeros(std::size_t classes, std::size_t hidden);
};

/// Parameter gradients share the parameter layout.
struct Gradients {
  LstmParams lstm;
  DenseParams dense;

  double squared_norm() const;
  void scale(double factor);
};

struct Model {
  ModelConfig config;
  LstmParams lstm;
  DenseParams dense;
};

inline constexpr std::size_t kNumTensors = 10;
inline constexpr std::array<std::string_view, kNumTensors> kTensorNames = {
    "lstm.w_forget", "lstm.w_input", "lstm.w_candidate", "lstm.w_output", "lstm.b_forget",
    "lstm.b_input",  "lstm.b_candidate", "lstm.b_output", "dense.weight", "dense.bias"};

/// Flat views of the ten tensors in kTensorNames order.
std::array<std::span<double>, kNumTensors> tensor_views(LstmParams& lstm, DenseParams& dense);
std::array<std::span<const double>, kNumTensors> tensor_views(const LstmParams& lstm, const DenseParams& dense);
/// (rows, cols) of each tensor; biases are (n, 1).
std::array<std::pair<Eigen::Index, Eigen::Index>, kNumTensors> tensor_shapes(const LstmParams& lstm,
                                                                             const DenseParams& dense);

/// Hidden and cell state, one column per sequence in the batch.
struct LstmState {
  Matrix h;
  Matrix c;

  static LstmState zeros(std::size_t hidden, std::size_t batch);
};

/// Activations of one cell step, kept for backpropagation.
struct CellCache {
  Matrix input;      // [h_prev; x]
  Matrix forget;     // f
  Matrix input_gate; // i
  Matrix candidate;  // C~
  Matrix cell_prev;  // C_{t-1}
  Matrix cell;       // C_t
  Matrix output;     // o
  Matrix tanh_cell;  // tanh(C_t)
  Matrix hidden;     // h_t
};

/// One LSTM step for a batch (x is input x batch):
///   f = sig(W_f [h; x] + b_f), i = sig(W_i [h; x] + b_i),
///   C~ = tanh(W_C [h; x] + b_C), C' = f * C + i * C~,
///   o = sig(W_o [h; x] + b_o), h' = o * tanh(C').
/// Throws NumericError if the new state is not finite.
std::pair<LstmState, CellCache> lstm_cell(const LstmParams& params, const LstmState& state, const Matrix& x);

struct ForwardTrace {
  std::vector<CellCache> steps;
  Matrix dropout_mask;    // hidden x batch, entries 0 or 1/(1-p)
  Matrix dropped_hidden;  // h_T * mask
  Matrix logits;          // classes x batch
};

/// Unrolls lstm_cell from the zero state over `sequence` (one input x batch
/// matrix per timestep). Returns h_T and the per-step trace.
std::pair<Matrix, ForwardTrace> lstm_forward(const LstmParams& params, std::span<const Matrix> sequence);

struct DropoutResult {
  Matrix output;
  Matrix mask;
};

/// Inverted dropout: in training each unit is zeroed with probability p and
/// survivors are scaled by 1/(1-p); at inference it is the identity.
DropoutResult dropout(const Matrix& h, double p, bool training, Rng& rng);

/// Column-wise softmax with max subtraction.
Matrix softmax_columns(const Matrix& logits);
/// softmax(W h + b), one probability column per sample.
Matrix dense_softmax(const DenseParams& dense, const Matrix& h);

/// One input x batch matrix per timestep.
using SequenceBatch = std::vector<Matrix>;

/// Gathers the given rows of a windowized set into per-timestep matrices.
SequenceBatch gather_batch(const SequenceSet& sequences, std::span<const std::size_t> rows);

struct ForwardResult {
  Matrix probabilities;  // batch x classes
  std::optional<ForwardTrace> trace;  // only when training
};

/// Input -> LSTM -> dropout(h_T) -> dense softmax. `rng` is consumed only in
/// training mode with a non-zero dropout rate. Throws DataError on a shape
/// mismatch with the model configuration.
ForwardResult model_forward(const Model& model, const SequenceBatch& batch, bool training, Rng* rng);

/// Backpropagation through time. `dlogits` (batch x classes) is the gradient
/// of the batch-mean loss with respect to the logits, so the returned
/// gradients are already averaged over the batch.
Gradients model_backward(const Model& model, const ForwardTrace& trace, const Matrix& dlogits);

/// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases except the
/// forget-gate bias which starts at 1.
Model init_model(const ModelConfig& config, std::uint64_t seed);

/// Argmax per row; ties go to the lowest class id.
std::vector<ClassId> argmax_rows(const Matrix& probabilities);

}  // namespace nids
