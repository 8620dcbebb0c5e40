// SPDX-License-Identifier: Apache-2.0
// Shared fixtures: temporary directories, random data generators and the
// Gaussian-blob tables used by the pipeline tests.
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "nids/dataset.hpp"
#include "nids/features.hpp"
#include "nids/rng.hpp"

namespace nids::test {

/// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("nids-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

inline std::vector<ClassId> random_labels(Rng& rng, std::size_t n, std::size_t classes) {
  std::vector<ClassId> out(n);
  for (auto& y : out) y = static_cast<ClassId>(rng.index(classes));
  return out;
}

/// Isotropic Gaussian blobs: class k has counts[k] rows centred at
/// separation * e_(k mod F) with unit variance.
inline FlowTable gaussian_blobs(const std::vector<std::size_t>& counts, std::size_t features, double separation,
                                std::uint64_t seed) {
  Rng rng(seed, Stream::kSynthetic);
  FlowTable t;
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  t.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  for (std::size_t k = 0; k < counts.size(); ++k) t.class_names.push_back("class" + std::to_string(k));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    for (std::size_t i = 0; i < counts[k]; ++i, ++row) {
      for (std::size_t f = 0; f < features; ++f) {
        const double centre = f == k % features ? separation : 0.0;
        t.features(row, static_cast<Eigen::Index>(f)) = centre + rng.normal();
      }
      t.labels.push_back(static_cast<ClassId>(k));
    }
  }
  return t;
}

/// Wraps an already standardized table in a dataset with an identity
/// standardizer, as if it had been produced by preprocessing.
inline Dataset as_dataset(FlowTable table) {
  Dataset d;
  const auto f = static_cast<std::size_t>(table.features.cols());
  d.preprocessor.schema.kind = DatasetKind::kGeneric;
  d.preprocessor.schema.label_column = "label";
  for (std::size_t i = 0; i < f; ++i) {
    d.preprocessor.schema.feature_names.push_back("f" + std::to_string(i));
  }
  d.preprocessor.feature_names = d.preprocessor.schema.feature_names;
  d.preprocessor.standardizer.means.assign(f, 0.0);
  d.preprocessor.standardizer.stds.assign(f, 1.0);
  d.preprocessor.class_names = table.class_names;
  d.table = std::move(table);
  return d;
}

/// Generic flow CSV (dur, proto, bytes, pkts, label) with three classes:
/// every tenth row "probe", every fourth other row "dos", the rest "benign".
/// proto is symbolic ("tcp"/"udp") and must be declared categorical.
inline std::string synthetic_flow_csv(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed, Stream::kSynthetic);
  std::ostringstream os;
  os << "dur,proto,bytes,pkts,label\n";
  const char* names[] = {"benign", "dos", "probe"};
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t k = i % 10 == 0 ? 2 : (i % 4 == 0 ? 1 : 0);
    const double c = k == 0 ? 0.0 : (k == 1 ? 3.0 : -3.0);
    os << c + rng.normal() << ',' << (rng.uniform() < 0.5 ? "tcp" : "udp") << ',' << -c + rng.normal() << ','
       << 0.5 * c + rng.normal() << ',' << names[k] << '\n';
  }
  return os.str();
}

/// Headerless KDD99-layout rows with random symbolic columns, cycling
/// through six raw labels that cover all five categories.
inline std::string synthetic_kdd_csv(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, Stream::kSynthetic);
  const char* labels[] = {"normal.", "smurf.", "neptune.", "nmap.", "guess_passwd.", "rootkit."};
  const char* protos[] = {"tcp", "udp", "icmp"};
  const char* services[] = {"http", "ftp", "smtp", "private"};
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) {
    os << rng.index(100) << ',' << protos[rng.index(3)] << ',' << services[rng.index(4)] << ",SF,"
       << rng.uniform() * 1000.0;
    for (int c = 5; c < 41; ++c) os << ',' << rng.uniform();
    os << ',' << labels[i % 6] << '\n';
  }
  return os.str();
}

}  // namespace nids::test
