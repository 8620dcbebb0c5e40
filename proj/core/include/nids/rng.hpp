// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace nids {

/// Independent purposes that draw random numbers. Each gets its own stream
/// so that, e.g., changing the dropout rate never perturbs the data split.
enum class Stream : std::uint64_t {
  kSplit = 1,
  kSmote = 2,
  kInit = 3,
  kShuffle = 4,
  kDropout = 5,
  kSynthetic = 6,
  kSample = 7,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seeded 64-bit generator reproducible across platforms.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The std <random> distributions are not (their algorithms are
/// implementation-defined), so all derived variates are computed here from
/// raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Stream keyed by (seed, purpose, id); distinct keys give unrelated sequences.
  Rng(std::uint64_t seed, Stream purpose, std::uint64_t id = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [0, n) by rejection; n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (used only for synthetic test data).
  double normal();

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nids
