// SPDX-License-Identifier: Apache-2.0
#include "nids/checkpoint.hpp"

#include <charconv>
#include <sstream>

#include "nids/errors.hpp"

namespace nids {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_optional(BinaryWriter& out, const std::optional<double>& v) {
  out.u8(v ? 1 : 0);
  out.f64(v.value_or(0.0));
}

std::optional<double> read_optional(BinaryReader& in) {
  const bool present = in.u8() != 0;
  const double v = in.f64();
  return present ? std::optional<double>(v) : std::nullopt;
}

std::array<std::pair<Eigen::Index, Eigen::Index>, kNumTensors> expected_shapes(const ModelConfig& c) {
  const auto h = static_cast<Eigen::Index>(c.hidden_dim);
  const auto in = static_cast<Eigen::Index>(c.input_dim);
  const auto k = static_cast<Eigen::Index>(c.num_classes);
  return {{{h, h + in}, {h, h + in}, {h, h + in}, {h, h + in}, {h, 1}, {h, 1}, {h, 1}, {h, 1}, {k, h}, {k, 1}}};
}

}  // namespace

std::string TrainHistory::to_csv() const {
  bool holdout = false;
  for (const auto& e : epochs) holdout = holdout || e.holdout_loss.has_value();
  std::ostringstream os;
  os << "epoch,loss,accuracy" << (holdout ? ",holdout_loss,holdout_accuracy" : "") << '\n';
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& e = epochs[i];
    os << i + 1 << ',' << format_double(e.loss) << ',' << format_double(e.accuracy);
    if (holdout) {
      os << ',' << (e.holdout_loss ? format_double(*e.holdout_loss) : "") << ','
         << (e.holdout_accuracy ? format_double(*e.holdout_accuracy) : "");
    }
    os << '\n';
  }
  return os.str();
}

void Checkpoint::write(BinaryWriter& out) const {
  out.raw(std::string_view(kCheckpointMagic, 8));
  out.u8(kCheckpointVersion);
  const auto& c = model.config;
  out.u64(c.input_dim);
  out.u64(c.hidden_dim);
  out.u64(c.num_classes);
  out.u64(c.seq_len);
  out.f64(c.dropout);

  const auto views = tensor_views(model.lstm, model.dense);
  const auto shapes = tensor_shapes(model.lstm, model.dense);
  out.u64(kNumTensors);
  for (std::size_t t = 0; t < kNumTensors; ++t) {
    out.string(kTensorNames[t]);
    out.u64(static_cast<std::uint64_t>(shapes[t].first));
    out.u64(static_cast<std::uint64_t>(shapes[t].second));
    // Row-major payload regardless of the in-memory storage order.
    const auto rows = shapes[t].first;
    const auto cols = shapes[t].second;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index col = 0; col < cols; ++col) out.f64(views[t][static_cast<std::size_t>(col * rows + r)]);
    }
  }

  preprocessor.write(out);
  out.string(config.to_text());

  out.u64(history.epochs.size());
  for (const auto& e : history.epochs) {
    out.f64(e.loss);
    out.f64(e.accuracy);
    write_optional(out, e.holdout_loss);
    write_optional(out, e.holdout_accuracy);
  }

  out.u8(adam ? 1 : 0);
  if (adam) {
    out.f64(adam->config.lr);
    out.f64(adam->config.beta1);
    out.f64(adam->config.beta2);
    out.f64(adam->config.eps);
    out.u64(adam->step);
    for (std::size_t t = 0; t < kNumTensors; ++t) {
      out.f64s(adam->m[t]);
      out.f64s(adam->v[t]);
    }
  }
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
  BinaryWriter out;
  write(out);
  return out.bytes();
}

void Checkpoint::save(const std::filesystem::path& path) const {
  BinaryWriter out;
  write(out);
  out.save(path);
}

Checkpoint Checkpoint::deserialize(BinaryReader& in) {
  if (in.size() < 8 || in.raw(8) != std::string_view(kCheckpointMagic, 8)) {
    throw DataError("not a checkpoint (bad magic)");
  }
  const std::uint8_t version = in.u8();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  auto& c = ck.model.config;
  c.input_dim = in.u64();
  c.hidden_dim = in.u64();
  c.num_classes = in.u64();
  c.seq_len = in.u64();
  c.dropout = in.f64();
  try {
    c.validate();
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint model config is invalid: ") + e.what());
  }

  ck.model.lstm = LstmParams::zeros(c.hidden_dim, c.input_dim);
  ck.model.dense = DenseParams::zeros(c.num_classes, c.hidden_dim);
  const auto shapes = expected_shapes(c);
  if (in.u64() != kNumTensors) throw DataError("checkpoint must hold " + std::to_string(kNumTensors) + " tensors");
  auto views = tensor_views(ck.model.lstm, ck.model.dense);
  for (std::size_t t = 0; t < kNumTensors; ++t) {
    const std::size_t at = in.offset();
    const std::string name = in.string();
    const auto rows = static_cast<Eigen::Index>(in.u64());
    const auto cols = static_cast<Eigen::Index>(in.u64());
    if (name != kTensorNames[t] || rows != shapes[t].first || cols != shapes[t].second) {
      throw DataError("unexpected tensor '" + name + "' (" + std::to_string(rows) + "x" + std::to_string(cols) +
                      ") at offset " + std::to_string(at) + ", expected " + std::string(kTensorNames[t]) + " (" +
                      std::to_string(shapes[t].first) + "x" + std::to_string(shapes[t].second) + ")");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index col = 0; col < cols; ++col) views[t][static_cast<std::size_t>(col * rows + r)] = in.f64();
    }
  }

  ck.preprocessor = Preprocessor::read(in);
  if (ck.preprocessor.class_names.size() != c.num_classes) {
    throw DataError("checkpoint class names do not match the model's class count");
  }
  try {
    ck.config = RunConfig::parse(in.string());
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint run config is invalid: ") + e.what());
  }

  const std::size_t n_epochs = in.count(34);
  ck.history.epochs.resize(n_epochs);
  for (auto& e : ck.history.epochs) {
    e.loss = in.f64();
    e.accuracy = in.f64();
    e.holdout_loss = read_optional(in);
    e.holdout_accuracy = read_optional(in);
  }

  if (in.u8() != 0) {
    AdamState state = AdamState::for_model(ck.model, AdamConfig{});
    state.config.lr = in.f64();
    state.config.beta1 = in.f64();
    state.config.beta2 = in.f64();
    state.config.eps = in.f64();
    state.step = in.u64();
    for (std::size_t t = 0; t < kNumTensors; ++t) {
      auto m = in.f64s();
      auto v = in.f64s();
      if (m.size() != views[t].size() || v.size() != views[t].size()) {
        throw DataError("optimizer moments for " + std::string(kTensorNames[t]) + " do not match the tensor size");
      }
      state.m[t] = std::move(m);
      state.v[t] = std::move(v);
    }
    ck.adam = std::move(state);
  }
  if (!in.at_end()) throw DataError("trailing bytes after checkpoint at offset " + std::to_string(in.offset()));
  return ck;
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  auto in = BinaryReader::open(path);
  try {
    return deserialize(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

void describe_preprocessor(std::ostream& os, const Preprocessor& p) {
  os << "dataset kind: " << to_string(p.schema.kind) << '\n'
     << "raw features: " << p.schema.feature_names.size() << '\n'
     << "encoded features: " << p.feature_names.size() << '\n';
  for (const auto& col : p.encoder.columns()) {
    os << "  categorical " << p.schema.feature_names[col.index] << ": " << col.vocabulary.size() << " values\n";
  }
}

}  // namespace

std::string inspect_file(const std::filesystem::path& path) {
  auto in = BinaryReader::open(path);
  const std::string magic = in.size() >= 8 ? in.raw(8) : std::string();
  in = BinaryReader::open(path);
  std::ostringstream os;
  try {
    if (magic == std::string_view(kDatasetMagic, 8)) {
      const Dataset d = Dataset::deserialize(in);
      os << "dataset container, format version " << int{kDatasetVersion} << '\n'
         << "rows: " << d.table.num_rows() << '\n';
      describe_preprocessor(os, d.preprocessor);
      os << "classes:\n";
      const auto hist = d.table.histogram();
      for (std::size_t k = 0; k < hist.size(); ++k) os << "  " << k << ' ' << d.table.class_names[k] << ": " << hist[k] << '\n';
      return os.str();
    }
    if (magic == std::string_view(kCheckpointMagic, 8)) {
      const Checkpoint ck = Checkpoint::deserialize(in);
      const auto& c = ck.model.config;
      os << "checkpoint, format version " << int{kCheckpointVersion} << '\n'
         << "model: input " << c.input_dim << ", hidden " << c.hidden_dim << ", classes " << c.num_classes
         << ", seq-len " << c.seq_len << ", dropout " << format_double(c.dropout) << '\n'
         << "tensors:\n";
      const auto shapes = tensor_shapes(ck.model.lstm, ck.model.dense);
      for (std::size_t t = 0; t < kNumTensors; ++t) {
        os << "  " << kTensorNames[t] << ' ' << shapes[t].first << 'x' << shapes[t].second << '\n';
      }
      describe_preprocessor(os, ck.preprocessor);
      os << "classes:\n";
      for (std::size_t k = 0; k < ck.preprocessor.class_names.size(); ++k) {
        os << "  " << k << ' ' << ck.preprocessor.class_names[k] << '\n';
      }
      os << "epochs trained: " << ck.history.epochs.size() << '\n'
         << "optimizer state: " << (ck.adam ? "step " + std::to_string(ck.adam->step) : std::string("none")) << '\n'
         << "config:\n";
      std::istringstream cfg(ck.config.to_text());
      for (std::string line; std::getline(cfg, line);) os << "  " << line << '\n';
      return os.str();
    }
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  throw DataError(path.string() + ": unrecognized file (bad magic)");
}

}  // namespace nids
