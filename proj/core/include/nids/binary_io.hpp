// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nids/types.hpp"

namespace nids {

/// Little-endian byte sink used by every on-disk container.
class BinaryWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v);
  void raw(std::string_view s);
  /// u32 length prefix followed by the bytes.
  void string(std::string_view s);
  void strings(std::span<const std::string> values);
  void f64s(std::span<const double> values);
  /// Shape-prefixed (u64 rows, u64 cols) matrix, row-major payload.
  void matrix(const Matrix& m);
  void row_matrix(const RowMatrix& m);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked reader; any short read throws DataError naming the offset.
class BinaryReader {
 public:
  explicit BinaryReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}
  static BinaryReader open(const std::filesystem::path& path);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64();
  std::string raw(std::size_t n);
  std::string string();
  std::vector<std::string> strings();
  std::vector<double> f64s();
  Matrix matrix();
  RowMatrix row_matrix();

  /// Reads a u64 element count and checks that `count * min_element_size`
  /// bytes remain, so corrupt counts fail fast instead of allocating.
  std::size_t count(std::size_t min_element_size);

  std::size_t offset() const { return offset_; }
  std::size_t size() const { return bytes_.size(); }
  bool at_end() const { return offset_ == bytes_.size(); }

 private:
  void need(std::size_t n) const;

  std::vector<std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

}  // namespace nids
