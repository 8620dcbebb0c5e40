// SPDX-License-Identifier: Apache-2.0
#include "nids/rng.hpp"

#include <cmath>
#include <numbers>

namespace nids {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

Rng::Rng(std::uint64_t seed, Stream purpose, std::uint64_t id)
    : engine_(mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(purpose))) + id)) {}

std::size_t Rng::index(std::size_t n) {
  const auto range = static_cast<std::uint64_t>(n);
  // Values below 2^64 mod n would bias the modulo; reject them.
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return static_cast<std::size_t>(r % range);
  }
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nids
