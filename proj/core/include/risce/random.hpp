#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "risce/types.hpp"

namespace risce {

using Rng = std::mt19937_64;

/// Independent stream keyed by a tuple of integers, e.g. (seed, sweep, trial).
inline Rng make_stream(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size());
  for (auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = var.
inline cd complex_gaussian(Rng& rng, double var = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline double uniform_angle(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
  return u(rng);
}

inline CMat complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                    double var = 1.0) {
  CMat out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_gaussian(rng, var);
  return out;
}

}  // namespace risce
