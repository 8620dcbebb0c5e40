// SPDX-License-Identifier: Apache-2.0
#include "nids/dataset.hpp"

#include "nids/errors.hpp"

namespace nids {

FlowTable Preprocessor::transform(const RawTable& rows, const LabelMap& labels) const {
  if (labels.class_names() != class_names) {
    throw DataError("label map classes differ from the classes the preprocessor was fitted with");
  }
  FlowTable table;
  table.class_names = class_names;
  table.labels = map_labels(rows.labels(), labels);
  table.features = encoder.transform(rows);
  standardizer.apply_in_place(table.features);
  table.validate();
  return table;
}

void Preprocessor::write(BinaryWriter& out) const {
  out.u8(static_cast<std::uint8_t>(schema.kind));
  out.strings(schema.feature_names);
  out.u64(schema.categorical_indices.size());
  for (std::size_t idx : schema.categorical_indices) out.u64(idx);
  out.string(schema.label_column);
  out.strings(schema.categorical_names);

  out.u64(encoder.columns().size());
  for (const auto& col : encoder.columns()) {
    out.u64(col.index);
    out.strings(col.vocabulary);
  }
  out.f64s(standardizer.means);
  out.f64s(standardizer.stds);
  out.strings(class_names);
  out.strings(feature_names);
}

Preprocessor Preprocessor::read(BinaryReader& in) {
  Preprocessor p;
  const std::uint8_t kind = in.u8();
  if (kind > static_cast<std::uint8_t>(DatasetKind::kGeneric)) {
    throw DataError("unknown dataset kind " + std::to_string(kind) + " at offset " + std::to_string(in.offset() - 1));
  }
  p.schema.kind = static_cast<DatasetKind>(kind);
  p.schema.feature_names = in.strings();
  const std::size_t n_cat = in.count(8);
  for (std::size_t i = 0; i < n_cat; ++i) p.schema.categorical_indices.insert(in.u64());
  p.schema.label_column = in.string();
  p.schema.categorical_names = in.strings();
  p.schema.validate();

  const std::size_t n_cols = in.count(16);
  std::vector<CategoricalEncoder::Column> columns(n_cols);
  for (auto& col : columns) {
    col.index = in.u64();
    col.vocabulary = in.strings();
  }
  p.encoder = CategoricalEncoder(std::move(columns));
  p.standardizer.means = in.f64s();
  p.standardizer.stds = in.f64s();
  p.class_names = in.strings();
  p.feature_names = in.strings();
  if (p.standardizer.means.size() != p.standardizer.stds.size() ||
      p.standardizer.means.size() != p.feature_names.size()) {
    throw DataError("preprocessor block is inconsistent (standardizer width vs. feature names)");
  }
  return p;
}

void Dataset::write(BinaryWriter& out) const {
  out.raw(std::string_view(kDatasetMagic, 8));
  out.u8(kDatasetVersion);
  preprocessor.write(out);
  out.row_matrix(table.features);
  out.u64(table.labels.size());
  for (ClassId y : table.labels) out.i32(y);
}

std::vector<std::uint8_t> Dataset::serialize() const {
  BinaryWriter out;
  write(out);
  return out.bytes();
}

void Dataset::save(const std::filesystem::path& path) const {
  BinaryWriter out;
  write(out);
  out.save(path);
}

Dataset Dataset::deserialize(BinaryReader& in) {
  if (in.size() < 8 || in.raw(8) != std::string_view(kDatasetMagic, 8)) {
    throw DataError("not a dataset container (bad magic)");
  }
  const std::uint8_t version = in.u8();
  if (version != kDatasetVersion) {
    throw DataError("unsupported dataset container version " + std::to_string(version));
  }
  Dataset d;
  d.preprocessor = Preprocessor::read(in);
  d.table.class_names = d.preprocessor.class_names;
  d.table.features = in.row_matrix();
  const std::size_t n = in.count(4);
  d.table.labels.resize(n);
  for (auto& y : d.table.labels) y = in.i32();
  if (!in.at_end()) {
    throw DataError("trailing bytes after dataset container at offset " + std::to_string(in.offset()));
  }
  d.table.validate();
  return d;
}

Dataset Dataset::load(const std::filesystem::path& path) {
  auto in = BinaryReader::open(path);
  try {
    return deserialize(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

PreparedData prepare(const RawTable& cleaned, const LabelMap& labels, const PrepareOptions& options) {
  if (cleaned.num_rows() == 0) throw DataError("no rows left to prepare");
  const auto ids = map_labels(cleaned.labels(), labels);

  PreparedData out;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  if (options.split) {
    auto idx = stratified_split(ids, labels.num_classes(), options.test_fraction, options.seed);
    train_rows = std::move(idx.train);
    test_rows = std::move(idx.test);
    out.warnings = std::move(idx.warnings);
  } else {
    train_rows.resize(cleaned.num_rows());
    for (std::size_t i = 0; i < train_rows.size(); ++i) train_rows[i] = i;
  }

  const RawTable train_raw = cleaned.select(train_rows);
  Preprocessor prep;
  prep.schema = cleaned.schema();
  prep.class_names = labels.class_names();
  prep.encoder = CategoricalEncoder::fit(train_raw);
  prep.feature_names = prep.encoder.feature_names(prep.schema);
  prep.standardizer = Standardizer::fit(prep.encoder.transform(train_raw));

  out.train = Dataset{prep, prep.transform(train_raw, labels)};
  if (options.split) {
    out.test = Dataset{prep, prep.transform(cleaned.select(test_rows), labels)};
  }
  return out;
}

}  // namespace nids
