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

#include "aroma/types.hpp"

#include <cstddef>

namespace aroma {

/// q' W p visiting only nonzero (k, l) pairs: O(nnz(q) * nnz(p)).
/// Summation order is fixed (query support outer, object support inner,
/// double accumulation) so repeated evaluations are bit-identical.
/// `pair_visits`, when given, receives the number of index pairs touched.
template <typename Scalar, typename Derived>
Scalar bilinear_score(const SparseVector<Scalar>& query,
                      const Eigen::MatrixBase<Derived>& weights,
                      const SparseVector<Scalar>& object,
                      std::size_t* pair_visits = nullptr) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>);
  require_dims(query.dim() == weights.rows() && object.dim() == weights.cols(),
               "bilinear score: expected " + std::to_string(weights.rows()) +
                   "x" + std::to_string(weights.cols()) + " operands, got |q|=" +
                   std::to_string(query.dim()) + " |p|=" +
                   std::to_string(object.dim()));
  const auto qi = query.indices();
  const auto qv = query.values();
  const auto pi = object.indices();
  const auto pv = object.values();
  double acc = 0;
  std::size_t visits = 0;
  for (std::size_t a = 0; a < qi.size(); ++a) {
    double row = 0;
    for (std::size_t b = 0; b < pi.size(); ++b) {
      row += static_cast<double>(weights(qi[a], pi[b])) *
             static_cast<double>(pv[b]);
      ++visits;
    }
    acc += static_cast<double>(qv[a]) * row;
  }
  if (pair_visits) *pair_visits = visits;
  return static_cast<Scalar>(acc);
}

/// Column-stacked vector of a matrix; vec(W) . vec(q p') = q' W p.
template <typename Derived>
VectorX<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& mat) {
  VectorX<typename Derived::Scalar> out(mat.size());
  Index k = 0;
  for (Index c = 0; c < mat.cols(); ++c)
    for (Index r = 0; r < mat.rows(); ++r) out(k++) = mat(r, c);
  return out;
}

/// Rank-1 matrix q p'; only the sparse support is nonzero.
template <typename Scalar>
MatrixX<Scalar> outer(const SparseVector<Scalar>& q,
                      const SparseVector<Scalar>& p) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(q.dim(), p.dim());
  const auto qi = q.indices();
  const auto qv = q.values();
  const auto pi = p.indices();
  const auto pv = p.values();
  for (std::size_t a = 0; a < qi.size(); ++a)
    for (std::size_t b = 0; b < pi.size(); ++b)
      out(qi[a], pi[b]) = qv[a] * pv[b];
  return out;
}

/// s' M s over the sparse support of s. M is assumed symmetric.
template <typename Scalar, typename Derived>
Scalar sparse_quad_form(const SparseVector<Scalar>& s,
                        const Eigen::MatrixBase<Derived>& mat) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>);
  require_dims(mat.rows() == mat.cols() && s.dim() == mat.rows(),
               "quadratic form: dimension mismatch");
  const auto si = s.indices();
  const auto sv = s.values();
  double acc = 0;
  for (std::size_t a = 0; a < si.size(); ++a) {
    double row = 0;
    for (std::size_t b = 0; b < si.size(); ++b)
      row += static_cast<double>(mat(si[a], si[b])) * static_cast<double>(sv[b]);
    acc += static_cast<double>(sv[a]) * row;
  }
  return static_cast<Scalar>(acc);
}

/// (q' Lambda q) * (p' Omega p): the Kronecker-covariance quadratic form on
/// vec(q p') without materializing the mn x mn matrix.
template <typename Scalar, typename DerivedL, typename DerivedO>
Scalar kron_quadratic_form(const SparseVector<Scalar>& q,
                           const Eigen::MatrixBase<DerivedL>& query_cov,
                           const SparseVector<Scalar>& p,
                           const Eigen::MatrixBase<DerivedO>& object_cov) {
  require_dims(query_cov.rows() == query_cov.cols() &&
                   query_cov.rows() == q.dim(),
               "kron quadratic form: query-side dimension mismatch");
  require_dims(object_cov.rows() == object_cov.cols() &&
                   object_cov.rows() == p.dim(),
               "kron quadratic form: object-side dimension mismatch");
  return sparse_quad_form(q, query_cov) * sparse_quad_form(p, object_cov);
}

/// M s for sparse s, accumulated column by column over the support.
template <typename Scalar, typename Derived>
VectorX<Scalar> dense_times_sparse(const Eigen::MatrixBase<Derived>& mat,
                                   const SparseVector<Scalar>& s) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>);
  require_dims(mat.cols() == s.dim(), "matrix-vector product: dimension mismatch");
  VectorX<Scalar> out = VectorX<Scalar>::Zero(mat.rows());
  const auto si = s.indices();
  const auto sv = s.values();
  for (std::size_t t = 0; t < si.size(); ++t)
    out.noalias() += sv[t] * mat.col(si[t]);
  return out;
}

/// In-place (A + A') / 2; removes round-off drift after rank-1 downdates.
template <typename Scalar>
void symmetrize(MatrixX<Scalar>& a) {
  MatrixX<Scalar> t = a.transpose();
  a = Scalar(0.5) * (a + t);
}

}  // namespace aroma
