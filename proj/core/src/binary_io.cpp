// SPDX-License-Identifier: Apache-2.0
#include "nids/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "nids/errors.hpp"

namespace nids {

void BinaryWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

void BinaryWriter::string(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void BinaryWriter::strings(std::span<const std::string> values) {
  u64(values.size());
  for (const auto& s : values) string(s);
}

void BinaryWriter::f64s(std::span<const double> values) {
  u64(values.size());
  for (double v : values) f64(v);
}

void BinaryWriter::matrix(const Matrix& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
}

void BinaryWriter::row_matrix(const RowMatrix& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  bytes_.reserve(bytes_.size() + static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

BinaryReader BinaryReader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return BinaryReader(std::move(bytes));
}

void BinaryReader::need(std::size_t n) const {
  if (n > bytes_.size() - offset_) {
    throw DataError("truncated input: needed " + std::to_string(n) + " bytes at offset " +
                    std::to_string(offset_) + " but only " + std::to_string(bytes_.size() - offset_) +
                    " remain (size " + std::to_string(bytes_.size()) + ")");
  }
}

std::uint8_t BinaryReader::u8() {
  need(1);
  return bytes_[offset_++];
}

std::uint32_t BinaryReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[offset_ + i]) << (8 * i);
  offset_ += 4;
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[offset_ + i]) << (8 * i);
  offset_ += 8;
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::raw(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + offset_), n);
  offset_ += n;
  return s;
}

std::string BinaryReader::string() { return raw(u32()); }

std::size_t BinaryReader::count(std::size_t min_element_size) {
  const std::size_t at = offset_;
  const std::uint64_t n = u64();
  if (min_element_size > 0 && n > (bytes_.size() - offset_) / min_element_size) {
    throw DataError("corrupt element count " + std::to_string(n) + " at offset " + std::to_string(at));
  }
  return static_cast<std::size_t>(n);
}

std::vector<std::string> BinaryReader::strings() {
  const std::size_t n = count(4);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(string());
  return out;
}

std::vector<double> BinaryReader::f64s() {
  const std::size_t n = count(8);
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

namespace {

std::pair<std::size_t, std::size_t> read_shape(BinaryReader& in) {
  const std::size_t at = in.offset();
  const std::uint64_t rows = in.u64();
  const std::uint64_t cols = in.u64();
  const std::size_t remaining = in.size() - in.offset();
  if (cols != 0 && rows > remaining / 8 / cols) {
    throw DataError("corrupt matrix shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " at offset " + std::to_string(at));
  }
  return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)};
}

}  // namespace

Matrix BinaryReader::matrix() {
  const auto [rows, cols] = read_shape(*this);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = f64();
  return m;
}

RowMatrix BinaryReader::row_matrix() {
  const auto [rows, cols] = read_shape(*this);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
  return m;
}

}  // namespace nids
