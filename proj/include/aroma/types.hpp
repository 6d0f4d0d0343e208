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

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aroma {

using Real = double;
using Index = Eigen::Index;

// Dense state is row-major throughout so that serialized nested arrays
// mirror the in-memory layout.
template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Shape disagreement between operands.
struct DimensionError : Error {
  using Error::Error;
};
/// Malformed or inconsistent input data.
struct DataError : Error {
  using Error::Error;
};
/// Loss of positive definiteness or other numeric breakdown.
struct NumericalError : Error {
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

/// Sorted index/value vector. Indices are strictly increasing and stored
/// values are nonzero and finite.
template <typename Scalar>
class SparseVector {
 public:
  SparseVector() = default;

  explicit SparseVector(Index dim) : dim_(dim) {
    if (dim < 0) throw DataError("sparse vector dimension must be >= 0");
  }

  /// Builds from (index, value) pairs in any order. Rejects duplicate or
  /// out-of-range indices and non-finite values; exact zeros are dropped.
  static SparseVector from_entries(Index dim,
                                   std::vector<std::pair<Index, Scalar>> entries) {
    SparseVector v(dim);
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    v.indices_.reserve(entries.size());
    v.values_.reserve(entries.size());
    Index prev = -1;
    for (const auto& [idx, val] : entries) {
      if (idx < 0 || idx >= dim)
        throw DataError("sparse entry index " + std::to_string(idx) +
                        " out of range for dimension " + std::to_string(dim));
      if (idx == prev)
        throw DataError("duplicate sparse entry index " + std::to_string(idx));
      if (!std::isfinite(static_cast<double>(val)))
        throw DataError("non-finite sparse entry value at index " +
                        std::to_string(idx));
      prev = idx;
      if (val == Scalar(0)) continue;
      v.indices_.push_back(idx);
      v.values_.push_back(val);
    }
    return v;
  }

  template <typename Derived>
  static SparseVector from_dense(const Eigen::MatrixBase<Derived>& dense) {
    SparseVector v(dense.size());
    for (Index i = 0; i < dense.size(); ++i) {
      const Scalar x = dense(i);
      if (!std::isfinite(static_cast<double>(x)))
        throw DataError("non-finite value at index " + std::to_string(i));
      if (x != Scalar(0)) {
        v.indices_.push_back(i);
        v.values_.push_back(x);
      }
    }
    return v;
  }

  Index dim() const { return dim_; }
  Index nnz() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }

  std::span<const Index> indices() const { return indices_; }
  std::span<const Scalar> values() const { return values_; }

  template <typename Derived>
  Scalar dot(const Eigen::MatrixBase<Derived>& dense) const {
    require_dims(dense.size() == dim_, "sparse/dense dot: dimension mismatch");
    double acc = 0;
    for (std::size_t t = 0; t < indices_.size(); ++t)
      acc += static_cast<double>(values_[t]) *
             static_cast<double>(dense(indices_[t]));
    return static_cast<Scalar>(acc);
  }

  VectorX<Scalar> to_dense() const {
    VectorX<Scalar> out = VectorX<Scalar>::Zero(dim_);
    for (std::size_t t = 0; t < indices_.size(); ++t)
      out(indices_[t]) = values_[t];
    return out;
  }

  Scalar squared_norm() const {
    double acc = 0;
    for (const Scalar v : values_) acc += static_cast<double>(v) * v;
    return static_cast<Scalar>(acc);
  }

  bool operator==(const SparseVector&) const = default;

 private:
  Index dim_ = 0;
  std::vector<Index> indices_;
  std::vector<Scalar> values_;
};

/// a - b with exact cancellations removed.
template <typename Scalar>
SparseVector<Scalar> sparse_difference(const SparseVector<Scalar>& a,
                                       const SparseVector<Scalar>& b) {
  require_dims(a.dim() == b.dim(), "sparse difference: dimension mismatch");
  std::vector<std::pair<Index, Scalar>> merged;
  merged.reserve(a.nnz() + b.nnz());
  std::size_t i = 0, j = 0;
  const auto ai = a.indices(), bi = b.indices();
  const auto av = a.values(), bv = b.values();
  while (i < ai.size() || j < bi.size()) {
    if (j >= bi.size() || (i < ai.size() && ai[i] < bi[j])) {
      merged.emplace_back(ai[i], av[i]);
      ++i;
    } else if (i >= ai.size() || bi[j] < ai[i]) {
      merged.emplace_back(bi[j], -bv[j]);
      ++j;
    } else {
      merged.emplace_back(ai[i], av[i] - bv[j]);
      ++i;
      ++j;
    }
  }
  return SparseVector<Scalar>::from_entries(a.dim(), std::move(merged));
}

/// One ranking round: a query with a preferred and a less-preferred object.
template <typename Scalar>
struct Triplet {
  SparseVector<Scalar> query;
  SparseVector<Scalar> positive;
  SparseVector<Scalar> negative;

  /// The object difference the learners train on.
  SparseVector<Scalar> difference() const {
    return sparse_difference(positive, negative);
  }
};

}  // namespace aroma
