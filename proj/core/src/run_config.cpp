// SPDX-License-Identifier: Apache-2.0
#include "nids/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nids/errors.hpp"
#include "text.hpp"

namespace nids {

std::string_view to_string(LossKind kind) { return kind == LossKind::kFocal ? "focal" : "ce"; }

LossKind parse_loss_kind(std::string_view text) {
  const std::string t = detail::to_lower(detail::trim(text));
  if (t == "focal") return LossKind::kFocal;
  if (t == "ce") return LossKind::kCrossEntropy;
  throw UsageError("unknown loss '" + std::string(text) + "' (expected ce or focal)");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw UsageError("invalid number for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw UsageError("invalid non-negative integer for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string t = detail::to_lower(value);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw UsageError("invalid boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

}  // namespace

const std::vector<std::string_view>& RunConfig::keys() {
  static const std::vector<std::string_view> k = {
      "hidden", "seq-len", "dropout", "loss", "gamma", "alpha", "smote", "smote-k", "smote-policy", "lr",
      "beta1", "beta2", "eps", "clip-norm", "batch-size", "epochs", "seed", "shuffle"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = detail::trim(raw);
  if (key == "hidden") {
    hidden = parse_unsigned(key, value);
  } else if (key == "seq-len") {
    seq_len = parse_unsigned(key, value);
  } else if (key == "dropout") {
    dropout = parse_double(key, value);
  } else if (key == "loss") {
    loss = parse_loss_kind(value);
  } else if (key == "gamma") {
    gamma = parse_double(key, value);
  } else if (key == "alpha") {
    alpha = AlphaSpec::parse(value);
  } else if (key == "smote") {
    smote = parse_bool(key, value);
  } else if (key == "smote-k") {
    smote_k = parse_unsigned(key, value);
  } else if (key == "smote-policy") {
    smote_policy = TargetPolicy::parse(value);
  } else if (key == "lr") {
    adam.lr = parse_double(key, value);
  } else if (key == "beta1") {
    adam.beta1 = parse_double(key, value);
  } else if (key == "beta2") {
    adam.beta2 = parse_double(key, value);
  } else if (key == "eps") {
    adam.eps = parse_double(key, value);
  } else if (key == "clip-norm") {
    clip_norm = parse_double(key, value);
  } else if (key == "batch-size") {
    batch_size = parse_unsigned(key, value);
  } else if (key == "epochs") {
    epochs = parse_unsigned(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "shuffle") {
    shuffle = parse_bool(key, value);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "hidden = " << hidden << '\n'
     << "seq-len = " << seq_len << '\n'
     << "dropout = " << format_double(dropout) << '\n'
     << "loss = " << to_string(loss) << '\n'
     << "gamma = " << format_double(gamma) << '\n'
     << "alpha = " << alpha.to_string() << '\n'
     << "smote = " << (smote ? "true" : "false") << '\n'
     << "smote-k = " << smote_k << '\n'
     << "smote-policy = " << smote_policy.to_string() << '\n'
     << "lr = " << format_double(adam.lr) << '\n'
     << "beta1 = " << format_double(adam.beta1) << '\n'
     << "beta2 = " << format_double(adam.beta2) << '\n'
     << "eps = " << format_double(adam.eps) << '\n'
     << "clip-norm = " << format_double(clip_norm) << '\n'
     << "batch-size = " << batch_size << '\n'
     << "epochs = " << epochs << '\n'
     << "seed = " << seed << '\n'
     << "shuffle = " << (shuffle ? "true" : "false") << '\n';
  return os.str();
}

void RunConfig::validate() const {
  ModelConfig{1, hidden, 1, seq_len, dropout}.validate();
  adam.validate();
  if (!(gamma >= 0.0)) throw UsageError("gamma must be >= 0");
  if (smote_k < 1) throw UsageError("smote-k must be >= 1");
  if (!(clip_norm > 0.0)) throw UsageError("clip-norm must be > 0");
  if (batch_size < 1) throw UsageError("batch-size must be >= 1");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
}

ModelConfig RunConfig::model_config(std::size_t input_dim, std::size_t num_classes) const {
  ModelConfig cfg{input_dim, hidden, num_classes, seq_len, dropout};
  cfg.validate();
  return cfg;
}

FocalConfig RunConfig::focal_config(const std::vector<std::size_t>& histogram) const {
  if (loss == LossKind::kCrossEntropy) return FocalConfig::cross_entropy(histogram.size());
  return FocalConfig{gamma, resolve_alpha(alpha, histogram)};
}

}  // namespace nids
