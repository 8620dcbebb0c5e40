// SPDX-License-Identifier: Apache-2.0
#include "nids/schema.hpp"

#include <algorithm>
#include <cctype>

#include "nids/errors.hpp"
#include "text.hpp"

namespace nids {

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kKdd99:
      return "kdd99";
    case DatasetKind::kCicids2017:
      return "cicids2017";
    case DatasetKind::kGeneric:
      return "generic";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  const std::string lowered = detail::to_lower(detail::trim(text));
  if (lowered == "kdd99") return DatasetKind::kKdd99;
  if (lowered == "cicids2017") return DatasetKind::kCicids2017;
  if (lowered == "generic") return DatasetKind::kGeneric;
  throw UsageError("unknown dataset kind '" + std::string(text) + "' (expected kdd99, cicids2017 or generic)");
}

std::size_t Schema::resolve_header(const std::vector<std::string>& header) {
  std::vector<std::string> names;
  names.reserve(header.size());
  for (const auto& h : header) names.emplace_back(detail::trim(h));

  const auto label_it = std::find(names.begin(), names.end(), label_column);
  if (label_it == names.end()) {
    throw DataError("header has no label column '" + label_column + "'");
  }
  const auto label_pos = static_cast<std::size_t>(label_it - names.begin());
  names.erase(label_it);

  if (resolved()) {
    if (names.size() != feature_names.size()) {
      throw DataError("header has " + std::to_string(names.size()) + " feature columns, expected " +
                      std::to_string(feature_names.size()));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != feature_names[i]) {
        throw DataError("header column " + std::to_string(i) + " is '" + names[i] + "', expected '" +
                        feature_names[i] + "'");
      }
    }
    return label_pos;
  }

  if (kind == DatasetKind::kCicids2017 && names.size() != kCicids2017FeatureCount) {
    throw DataError("CICIDS2017 header has " + std::to_string(names.size()) + " feature columns, expected " +
                    std::to_string(kCicids2017FeatureCount));
  }
  feature_names = std::move(names);
  for (const auto& cat : categorical_names) {
    const auto it = std::find(feature_names.begin(), feature_names.end(), cat);
    if (it == feature_names.end()) throw DataError("categorical column '" + cat + "' not found in header");
    categorical_indices.insert(static_cast<std::size_t>(it - feature_names.begin()));
  }
  validate();
  return label_pos;
}

void Schema::validate() const {
  if (std::find(feature_names.begin(), feature_names.end(), label_column) != feature_names.end()) {
    throw DataError("label column '" + label_column + "' is also listed as a feature");
  }
  for (std::size_t idx : categorical_indices) {
    if (idx >= feature_names.size()) {
      throw DataError("categorical index " + std::to_string(idx) + " is out of range");
    }
  }
}

Schema kdd99_schema() {
  Schema s;
  s.kind = DatasetKind::kKdd99;
  s.feature_names = {"duration",
                     "protocol_type",
                     "service",
                     "flag",
                     "src_bytes",
                     "dst_bytes",
                     "land",
                     "wrong_fragment",
                     "urgent",
                     "hot",
                     "num_failed_logins",
                     "logged_in",
                     "num_compromised",
                     "root_shell",
                     "su_attempted",
                     "num_root",
                     "num_file_creations",
                     "num_shells",
                     "num_access_files",
                     "num_outbound_cmds",
                     "is_host_login",
                     "is_guest_login",
                     "count",
                     "srv_count",
                     "serror_rate",
                     "srv_serror_rate",
                     "rerror_rate",
                     "srv_rerror_rate",
                     "same_srv_rate",
                     "diff_srv_rate",
                     "srv_diff_host_rate",
                     "dst_host_count",
                     "dst_host_srv_count",
                     "dst_host_same_srv_rate",
                     "dst_host_diff_srv_rate",
                     "dst_host_same_src_port_rate",
                     "dst_host_srv_diff_host_rate",
                     "dst_host_serror_rate",
                     "dst_host_srv_serror_rate",
                     "dst_host_rerror_rate",
                     "dst_host_srv_rerror_rate"};
  s.categorical_indices = {1, 2, 3};
  s.label_column = "label";
  return s;
}

Schema cicids2017_schema() {
  Schema s;
  s.kind = DatasetKind::kCicids2017;
  s.label_column = "Label";
  return s;
}

Schema generic_schema(std::string label_column, std::vector<std::string> categorical_names) {
  Schema s;
  s.kind = DatasetKind::kGeneric;
  s.label_column = std::move(label_column);
  s.categorical_names = std::move(categorical_names);
  return s;
}

}  // namespace nids
