#pragma once

#include <cstdint>
#include <random>

#include "quiltsign/detline.hpp"

namespace qs_test {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Small integer matrix; with probability 1/3 forced to low rank.
inline quiltsign::QMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int bound = 3) {
  quiltsign::QMatrix m(rows, cols);
  if (rows > 0 && cols > 0 && uniform(rng, 0, 2) == 0) {
    const std::size_t r = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(std::min(rows, cols))));
    quiltsign::QMatrix a(rows, r), b(r, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < r; ++j) a(i, j) = uniform(rng, -bound, bound);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < cols; ++j) b(i, j) = uniform(rng, -bound, bound);
    return r == 0 ? quiltsign::QMatrix(rows, cols) : a * b;
  }
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(rng, -bound, bound);
  return m;
}

inline quiltsign::detline::FinOp random_finop(Rng& rng, int max_dim = 4) {
  const auto rows = static_cast<std::size_t>(uniform(rng, 0, max_dim));
  const auto cols = static_cast<std::size_t>(uniform(rng, 0, max_dim));
  return quiltsign::detline::FinOp::from_matrix(random_matrix(rng, rows, cols));
}

}  // namespace qs_test
