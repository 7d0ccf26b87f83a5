#pragma once

#include <cstdint>
#include <random>

#include "lsds/geometry.hpp"

namespace lsds {

using RandomStream = std::mt19937_64;

// Finalizer from splitmix64; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Seed for the stream family member `index` under `root_seed`.
inline std::uint64_t derive_seed(std::uint64_t root_seed, std::uint64_t index) {
  return mix64(root_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Deterministic generator for (root seed, stream index). Streams with
/// distinct indices are statistically independent; no global state.
inline RandomStream substream(std::uint64_t root_seed, std::uint64_t index) {
  const std::uint64_t s0 = derive_seed(root_seed, index);
  const std::uint64_t s1 = mix64(s0 + 0x9e3779b97f4a7c15ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                    static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32)};
  return RandomStream(seq);
}

/// Circularly-symmetric complex Gaussian with zero mean and unit total
/// variance: real and imaginary parts are each N(0, 1/2).
inline Complex standard_complex_gaussian(RandomStream& rng) {
  std::normal_distribution<double> comp(0.0, std::sqrt(0.5));
  const double re = comp(rng);
  const double im = comp(rng);
  return {re, im};
}

inline CVector complex_gaussian_vector(int n, RandomStream& rng) {
  std::normal_distribution<double> comp(0.0, std::sqrt(0.5));
  CVector v(n);
  for (int k = 0; k < n; ++k) {
    const double re = comp(rng);
    const double im = comp(rng);
    v(k) = Complex(re, im);
  }
  return v;
}

inline CMatrix complex_gaussian_matrix(int rows, int cols, RandomStream& rng) {
  std::normal_distribution<double> comp(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double re = comp(rng);
      const double im = comp(rng);
      m(r, c) = Complex(re, im);
    }
  return m;
}

}  // namespace lsds
