// SPDX-License-Identifier: Apache-2.0
#include "nids/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "nids/errors.hpp"
#include "nids/loss.hpp"
#include "nids/smote.hpp"

namespace nids {

namespace {

constexpr std::size_t kInferenceChunk = 4096;

std::vector<ClassId> gather_labels(const SequenceSet& seqs, std::span<const std::size_t> rows) {
  std::vector<ClassId> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(seqs.labels[r]);
  return out;
}

void check_model_input(const Model& model, const SequenceSet& seqs) {
  if (seqs.width != model.config.input_dim) {
    throw DataError("data has " + std::to_string(seqs.original_width) + " features, giving timestep width " +
                    std::to_string(seqs.width) + ", but the model expects " +
                    std::to_string(model.config.input_dim));
  }
}

Matrix predict_sequences(const Model& model, const SequenceSet& seqs) {
  check_model_input(model, seqs);
  const std::size_t n = seqs.size();
  Matrix probs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.config.num_classes));
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += kInferenceChunk) {
    const std::size_t end = std::min(n, start + kInferenceChunk);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const auto fwd = model_forward(model, gather_batch(seqs, rows), false, nullptr);
    probs.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) = fwd.probabilities;
  }
  return probs;
}

std::pair<double, double> loss_and_accuracy(const Model& model, const SequenceSet& seqs, const FocalConfig& focal) {
  if (seqs.size() == 0) return {0.0, 0.0};
  const Matrix probs = predict_sequences(model, seqs);
  const double loss = cfcl(probs, one_hot(seqs.labels, model.config.num_classes), focal);
  const auto pred = argmax_rows(probs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == seqs.labels[i] ? 1 : 0;
  return {loss, static_cast<double>(correct) / static_cast<double>(seqs.size())};
}

void check_resume(const Checkpoint& ck, const RunConfig& config, const Dataset& data, std::size_t input_dim) {
  if (!ck.adam) throw DataError("checkpoint has no optimizer state to resume from");
  if (ck.preprocessor != data.preprocessor) {
    throw DataError("resume checkpoint was trained on data with different preprocessing");
  }
  if (ck.model.config != config.model_config(input_dim, data.table.num_classes())) {
    throw UsageError("resume checkpoint model shape differs from the requested configuration");
  }
  if (ck.history.epochs.size() > config.epochs) {
    throw UsageError("resume checkpoint already has " + std::to_string(ck.history.epochs.size()) +
                     " epochs, more than the requested " + std::to_string(config.epochs));
  }
}

}  // namespace

TrainResult train(const RunConfig& config, const Dataset& data, const TrainOptions& options) {
  config.validate();
  if (data.table.num_rows() == 0) throw DataError("training set is empty");
  TrainResult result;
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  FlowTable table = data.table;
  if (config.smote) {
    SmoteResult s = smote_oversample(table, config.smote_config());
    for (auto& w : s.warnings) result.warnings.push_back(std::move(w));
    log("smote: " + std::to_string(table.num_rows()) + " -> " + std::to_string(s.table.num_rows()) + " rows");
    table = std::move(s.table);
  }
  const std::size_t classes = table.num_classes();
  const FocalConfig focal = config.focal_config(table.histogram());
  const SequenceSet seqs = windowize(table, config.seq_len);
  std::optional<SequenceSet> holdout;
  if (options.holdout) {
    if (options.holdout->table.class_names != table.class_names) {
      throw DataError("held-out set classes differ from the training classes");
    }
    holdout = windowize(options.holdout->table, config.seq_len);
  }

  Checkpoint& ck = result.checkpoint;
  ck.preprocessor = data.preprocessor;
  ck.config = config;
  std::size_t first_epoch = 0;
  if (options.resume) {
    check_resume(*options.resume, config, data, seqs.width);
    ck.model = options.resume->model;
    ck.history = options.resume->history;
    ck.adam = options.resume->adam;
    ck.adam->config = config.adam;
    first_epoch = ck.history.epochs.size();
  } else {
    ck.model = init_model(config.model_config(seqs.width, classes), config.seed);
    ck.adam = AdamState::for_model(ck.model, config.adam);
  }

  const std::size_t n = seqs.size();
  const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = first_epoch; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) Rng(config.seed, Stream::kShuffle, epoch).shuffle(std::span<std::size_t>(order));
    Rng dropout_rng(config.seed, Stream::kDropout, epoch);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t start = b * config.batch_size;
      const std::span<const std::size_t> rows(order.data() + start, std::min(n, start + config.batch_size) - start);
      const auto labels = gather_labels(seqs, rows);
      const Matrix targets = one_hot(labels, classes);

      const std::string where =
          "epoch " + std::to_string(epoch + 1) + ", batch " + std::to_string(b + 1) + " of " + std::to_string(batches);
      ForwardResult fwd;
      double loss = 0.0;
      try {
        fwd = model_forward(ck.model, gather_batch(seqs, rows), true, &dropout_rng);
        loss = cfcl(fwd.probabilities, targets, focal);
        if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
        Gradients grads = model_backward(ck.model, *fwd.trace, cfcl_grad_logits(fwd.probabilities, targets, focal));
        clip_global_norm(grads, config.clip_norm);
        adam_step(ck.model, grads, *ck.adam);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at " + where);
      }
      ++result.optimizer_steps;

      loss_sum += loss * static_cast<double>(rows.size());
      const auto pred = argmax_rows(fwd.probabilities);
      for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i] ? 1 : 0;
    }

    EpochRecord rec;
    rec.loss = loss_sum / static_cast<double>(n);
    rec.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    std::ostringstream msg;
    msg << "epoch " << epoch + 1 << '/' << config.epochs << ": loss " << rec.loss << ", accuracy " << rec.accuracy;
    if (holdout) {
      const auto [hl, ha] = loss_and_accuracy(ck.model, *holdout, focal);
      rec.holdout_loss = hl;
      rec.holdout_accuracy = ha;
      msg << ", held-out loss " << hl << ", held-out accuracy " << ha;
    }
    ck.history.epochs.push_back(rec);
    log(msg.str());
  }
  return result;
}

Matrix predict_proba(const Model& model, const FlowTable& table) {
  return predict_sequences(model, windowize(table, model.config.seq_len));
}

Evaluation evaluate(const Checkpoint& checkpoint, const Dataset& data) {
  const Preprocessor& want = checkpoint.preprocessor;
  const Preprocessor& got = data.preprocessor;
  if (got.class_names != want.class_names) {
    throw DataError("dataset classes differ from the checkpoint's classes");
  }
  if (got.feature_names != want.feature_names || !(got.encoder == want.encoder)) {
    throw DataError("dataset features differ from the checkpoint's features");
  }
  if (!(got.standardizer == want.standardizer)) {
    throw DataError("dataset was standardized with statistics other than the checkpoint's");
  }
  Evaluation ev;
  ev.predictions = argmax_rows(predict_proba(checkpoint.model, data.table));
  ev.confusion = confusion(data.table.labels, ev.predictions, want.class_names);
  ev.report = per_class_metrics(ev.confusion);
  return ev;
}

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::kNoSmoteCe:
      return "nosmote_ce";
    case Arm::kSmoteCe:
      return "smote_ce";
    case Arm::kSmoteFocal:
      return "smote_focal";
  }
  return {};
}

Arm parse_arm(std::string_view text) {
  for (Arm a : kAllArms) {
    if (to_string(a) == text) return a;
  }
  throw UsageError("unknown experiment arm '" + std::string(text) + "' (expected nosmote_ce, smote_ce or smote_focal)");
}

RunConfig arm_config(const RunConfig& base, Arm arm) {
  RunConfig cfg = base;
  cfg.smote = arm != Arm::kNoSmoteCe;
  cfg.loss = arm == Arm::kSmoteFocal ? LossKind::kFocal : LossKind::kCrossEntropy;
  return cfg;
}

std::vector<ArmResult> run_experiment(const RunConfig& base, const Dataset& train_data, const Dataset& test_data,
                                      std::span<const Arm> arms, const LogFn& log) {
  std::vector<ArmResult> results;
  for (Arm arm : arms) {
    if (log) log("arm " + std::string(to_string(arm)));
    TrainOptions opts;
    opts.log = log;
    ArmResult r{arm, train(arm_config(base, arm), train_data, opts), {}};
    r.evaluation = evaluate(r.training.checkpoint, test_data);
    results.push_back(std::move(r));
  }
  return results;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace

std::vector<std::string> write_run_files(const std::filesystem::path& dir, std::string_view tag,
                                         const Checkpoint& checkpoint, const Evaluation* evaluation) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create run directory " + dir.string() + ": " + ec.message());
  const std::string suffix = tag.empty() ? "" : "_" + std::string(tag);
  std::vector<std::string> names = {"checkpoint" + suffix + ".bin", "history" + suffix + ".csv"};
  checkpoint.save(dir / names[0]);
  write_text(dir / names[1], checkpoint.history.to_csv());
  if (evaluation) {
    names.push_back("metrics" + suffix + ".json");
    names.push_back("confusion" + suffix + ".csv");
    write_text(dir / names[2], evaluation->report.to_json());
    write_text(dir / names[3], evaluation->confusion.to_csv());
  }
  return names;
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& config,
                    std::span<const std::filesystem::path> inputs, std::span<const std::string> outputs) {
  nlohmann::ordered_json j;
  j["config"] = config.to_text();
  j["config_sha256"] = sha256_hex(config.to_text());
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  auto& out = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& name : outputs) out.push_back({{"file", name}, {"sha256", sha256_file(dir / name)}});
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace nids
