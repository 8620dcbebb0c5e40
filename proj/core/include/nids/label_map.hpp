// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nids/schema.hpp"
#include "nids/types.hpp"

namespace nids {

/// Canonical form used for label lookup: ASCII-lowercased, trimmed, internal
/// whitespace collapsed, trailing '.' removed (KDD99 suffixes every label with
/// one), and runs of non-ASCII bytes turned into '-' so that the several
/// encodings of "Web Attack – XSS" found in CICIDS2017 files coincide.
std::string normalize_label(std::string_view raw);

/// Raw attack name -> category. Class ids are positions in class_names, which
/// is the byte-wise sorted set of categories, so ids depend only on the map.
class LabelMap {
 public:
  LabelMap() = default;
  /// Builds from (raw name, class name) pairs; keys are normalized.
  explicit LabelMap(const std::vector<std::pair<std::string, std::string>>& pairs);

  /// Parses `key = value` lines; '#' starts a comment. Throws DataError.
  static LabelMap parse(std::string_view text);
  static LabelMap load(const std::filesystem::path& path);
  /// Table shipped with the library for KDD99 / CICIDS2017.
  static LabelMap bundled(DatasetKind kind);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t num_classes() const { return class_names_.size(); }

  /// Class id for a raw label, or -1 when unmapped. A label equal to a class
  /// name (after normalization) maps to that class.
  ClassId lookup(std::string_view raw) const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, ClassId> normalized_class_ids_;
  std::vector<std::string> class_names_;
};

/// Maps raw labels to class ids. Throws DataError listing every unmapped
/// label when any label is unknown.
std::vector<ClassId> map_labels(std::span<const std::string> raw_labels, const LabelMap& map);

}  // namespace nids
