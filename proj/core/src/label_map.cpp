// SPDX-License-Identifier: Apache-2.0
#include "nids/label_map.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nids/bundled_label_maps.hpp"
#include "nids/errors.hpp"
#include "text.hpp"

namespace nids {

std::string normalize_label(std::string_view raw) {
  // Non-ASCII runs become '-', everything else is lowercased.
  std::string s;
  s.reserve(raw.size());
  bool in_non_ascii = false;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) {
      if (!in_non_ascii) s.push_back('-');
      in_non_ascii = true;
      continue;
    }
    in_non_ascii = false;
    s.push_back(detail::is_space(ch) ? ' ' : static_cast<char>(std::tolower(c)));
  }

  // Collapse spaces, drop spaces around '-', collapse repeated '-'.
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ' ') {
      if (out.empty() || out.back() == ' ' || out.back() == '-') continue;
      std::size_t j = i;
      while (j < s.size() && s[j] == ' ') ++j;
      if (j < s.size() && s[j] == '-') continue;
      out.push_back(' ');
    } else if (c == '-') {
      if (!out.empty() && out.back() == '-') continue;
      out.push_back('-');
    } else {
      out.push_back(c);
    }
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == '.')) out.pop_back();
  return out;
}

LabelMap::LabelMap(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::set<std::string> classes;
  for (const auto& [raw, cls] : pairs) {
    const std::string key = normalize_label(raw);
    const std::string value(detail::trim(cls));
    if (key.empty() || value.empty()) throw DataError("label map entry with empty key or value");
    if (auto [it, inserted] = entries_.emplace(key, value); !inserted && it->second != value) {
      throw DataError("label map maps '" + key + "' to both '" + it->second + "' and '" + value + "'");
    }
    classes.insert(value);
  }
  class_names_.assign(classes.begin(), classes.end());
  for (std::size_t i = 0; i < class_names_.size(); ++i) {
    const std::string key = normalize_label(class_names_[i]);
    if (!normalized_class_ids_.emplace(key, static_cast<ClassId>(i)).second) {
      throw DataError("class names '" + class_names_[i] + "' collide after normalization");
    }
  }
}

LabelMap LabelMap::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("label map line " + std::to_string(line_no) + ": expected 'name = class'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw DataError("label map line " + std::to_string(line_no) + ": empty name or class");
    }
    pairs.emplace_back(std::string(key), std::string(value));
  }
  if (pairs.empty()) throw DataError("label map has no entries");
  return LabelMap(pairs);
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label map '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

LabelMap LabelMap::bundled(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kKdd99:
      return parse(detail::kKdd99LabelMap);
    case DatasetKind::kCicids2017:
      return parse(detail::kCicids2017LabelMap);
    case DatasetKind::kGeneric:
      break;
  }
  throw UsageError("no bundled label map for generic datasets; pass a label map file");
}

ClassId LabelMap::lookup(std::string_view raw) const {
  const std::string key = normalize_label(raw);
  if (const auto it = entries_.find(key); it != entries_.end()) {
    return normalized_class_ids_.at(normalize_label(it->second));
  }
  if (const auto it = normalized_class_ids_.find(key); it != normalized_class_ids_.end()) return it->second;
  return -1;
}

std::vector<ClassId> map_labels(std::span<const std::string> raw_labels, const LabelMap& map) {
  std::vector<ClassId> ids;
  ids.reserve(raw_labels.size());
  std::set<std::string> unknown;
  for (const auto& raw : raw_labels) {
    const ClassId id = map.lookup(raw);
    if (id < 0) unknown.insert(std::string(detail::trim(raw)));
    ids.push_back(id);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown label(s) not in label map:";
    for (const auto& u : unknown) msg += " '" + u + "'";
    throw DataError(msg);
  }
  return ids;
}

}  // namespace nids
