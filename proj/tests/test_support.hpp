// Copyright 2026 The Aroma Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared test helpers: portable RNG draws, random sparse inputs, and the
// explicit Kronecker-product oracle the factored-covariance tests compare
// against. Oracles here stay independent of the library implementation.

#pragma once

#include "aroma/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace aroma::testing {

inline double unit_draw(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_draw(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * unit_draw(g);
}

inline std::uint64_t below_draw(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
  std::uint64_t x = g();
  while (rem != 0 && x >= 0 - rem) x = g();
  return x % n;
}

inline double gaussian_draw(std::mt19937_64& g) {
  double u = unit_draw(g);
  while (u <= 0) u = unit_draw(g);
  const double v = unit_draw(g);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

/// Random sparse vector with nnz in [min_nnz, dim] and values in [-1, 1].
inline SparseVector<double> random_sparse(std::mt19937_64& g, Index dim,
                                          Index min_nnz = 1) {
  std::vector<std::pair<Index, double>> entries;
  const Index nnz = min_nnz + static_cast<Index>(below_draw(
                                  g, static_cast<std::uint64_t>(dim - min_nnz + 1)));
  std::vector<Index> all(dim);
  for (Index i = 0; i < dim; ++i) all[i] = i;
  for (Index i = 0; i < nnz; ++i) {  // partial Fisher-Yates
    const Index j = i + static_cast<Index>(below_draw(
                            g, static_cast<std::uint64_t>(dim - i)));
    std::swap(all[i], all[j]);
  }
  for (Index i = 0; i < nnz; ++i) {
    double v = uniform_draw(g, -1.0, 1.0);
    if (v == 0) v = 0.5;
    entries.emplace_back(all[i], v);
  }
  return SparseVector<double>::from_entries(dim, std::move(entries));
}

inline MatrixX<double> random_matrix(std::mt19937_64& g, Index rows, Index cols,
                                     double lo = -1.0, double hi = 1.0) {
  MatrixX<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = uniform_draw(g, lo, hi);
  return m;
}

/// Random symmetric positive-definite matrix: A A' + eps I.
inline MatrixX<double> random_spd(std::mt19937_64& g, Index n,
                                  double eps = 0.5) {
  const MatrixX<double> a = random_matrix(g, n, n);
  MatrixX<double> out = a * a.transpose();
  out += eps * MatrixX<double>::Identity(n, n);
  return out;
}

/// Explicit Kronecker product, nested-loop definition. Test oracle only.
inline MatrixX<double> kron_oracle(const MatrixX<double>& a,
                                   const MatrixX<double>& b) {
  MatrixX<double> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

}  // namespace aroma::testing
