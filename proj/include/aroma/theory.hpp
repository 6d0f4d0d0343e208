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

// Analytic companions to the learners: the matrix-variate Gaussian density
// and KL divergence, the factored-update objective, and the mistake bounds
// evaluated over recorded runs. Everything here is a pure function of its
// inputs so the guarantees can run as assertions.

#pragma once

#include "aroma/factored.hpp"
#include "aroma/linalg.hpp"
#include "aroma/trace.hpp"
#include "aroma/types.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace aroma {

namespace detail {

template <typename Scalar>
Eigen::LLT<MatrixX<Scalar>> pd_factor(const MatrixX<Scalar>& mat,
                                      const char* name) {
  Eigen::LLT<MatrixX<Scalar>> llt(mat);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(name) + " is not positive definite");
  return llt;
}

template <typename Scalar>
Scalar log_det(const Eigen::LLT<MatrixX<Scalar>>& llt) {
  Scalar acc = 0;
  const auto& l = llt.matrixLLT();
  for (Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return Scalar(2) * acc;
}

// Tr(A B) for same-shaped A (m x n) and B' (m x n).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_product(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b_t) {
  return (a.array() * b_t.array()).sum();
}

}  // namespace detail

/// Log density of the matrix-variate normal with mean `mean`, row covariance
/// `query_cov` (m x m) and column covariance `object_cov` (n x n); equals the
/// mn-dimensional Gaussian log density of vec(X) under object_cov (x) query_cov.
template <typename Scalar>
Scalar matnorm_logpdf(const MatrixX<Scalar>& x, const MatrixX<Scalar>& mean,
                      const MatrixX<Scalar>& object_cov,
                      const MatrixX<Scalar>& query_cov) {
  const Index m = x.rows();
  const Index n = x.cols();
  require_dims(mean.rows() == m && mean.cols() == n &&
                   query_cov.rows() == m && query_cov.cols() == m &&
                   object_cov.rows() == n && object_cov.cols() == n,
               "matrix normal logpdf: dimension mismatch");
  const auto llt_q = detail::pd_factor(query_cov, "row covariance");
  const auto llt_o = detail::pd_factor(object_cov, "column covariance");
  const MatrixX<Scalar> diff = x - mean;
  const MatrixX<Scalar> left = llt_q.solve(diff);                // Lambda^-1 D
  const MatrixX<Scalar> right = llt_o.solve(diff.transpose());   // Omega^-1 D'
  const Scalar trace_term = detail::trace_product(left, right.transpose());
  constexpr double kLog2Pi = 1.8378770664093454836;
  return Scalar(-0.5) * (Scalar(m * n) * Scalar(kLog2Pi) +
                         Scalar(n) * detail::log_det(llt_q) +
                         Scalar(m) * detail::log_det(llt_o) + trace_term);
}

/// Exact KL divergence between matrix-variate normals
/// N(mean0, object_cov0 (x) query_cov0) || N(mean1, object_cov1 (x) query_cov1).
/// The additive constant is pinned to -mn/2 so the divergence of a
/// distribution from itself is exactly zero.
template <typename Scalar>
Scalar matnorm_kl(const MatrixX<Scalar>& mean0, const MatrixX<Scalar>& object_cov0,
                  const MatrixX<Scalar>& query_cov0, const MatrixX<Scalar>& mean1,
                  const MatrixX<Scalar>& object_cov1,
                  const MatrixX<Scalar>& query_cov1) {
  const Index m = mean0.rows();
  const Index n = mean0.cols();
  require_dims(mean1.rows() == m && mean1.cols() == n &&
                   query_cov0.rows() == m && query_cov1.rows() == m &&
                   object_cov0.rows() == n && object_cov1.rows() == n,
               "matrix normal kl: dimension mismatch");
  const auto llt_q0 = detail::pd_factor(query_cov0, "row covariance");
  const auto llt_o0 = detail::pd_factor(object_cov0, "column covariance");
  const auto llt_q1 = detail::pd_factor(query_cov1, "row covariance");
  const auto llt_o1 = detail::pd_factor(object_cov1, "column covariance");

  const Scalar log_terms =
      Scalar(0.5) * (Scalar(n) * (detail::log_det(llt_q1) - detail::log_det(llt_q0)) +
                     Scalar(m) * (detail::log_det(llt_o1) - detail::log_det(llt_o0)));
  const Scalar coupling = Scalar(0.5) * llt_q1.solve(query_cov0).trace() *
                          llt_o1.solve(object_cov0).trace();
  const MatrixX<Scalar> diff = mean0 - mean1;
  const MatrixX<Scalar> left = llt_q1.solve(diff);
  const MatrixX<Scalar> right = llt_o1.solve(diff.transpose());
  const Scalar mean_term =
      Scalar(0.5) * detail::trace_product(left, right.transpose());
  return log_terms + coupling + mean_term - Scalar(0.5) * Scalar(m * n);
}

/// The per-round objective behind the factored update: KL-style divergence
/// terms to the previous state plus the squared triplet hinge and the
/// Kronecker confidence term, each scaled by 1/(2r). Evaluated literally.
template <typename Scalar>
Scalar faroma_objective(const MatrixX<Scalar>& mean,
                        const MatrixX<Scalar>& object_cov,
                        const MatrixX<Scalar>& query_cov,
                        const FactoredModel<Scalar>& previous,
                        const SparseVector<Scalar>& q,
                        const SparseVector<Scalar>& p, Scalar r) {
  const Index m = previous.rows();
  const Index n = previous.cols();
  require_dims(mean.rows() == m && mean.cols() == n && query_cov.rows() == m &&
                   object_cov.rows() == n && q.dim() == m && p.dim() == n,
               "factored objective: dimension mismatch");
  const auto llt_q_prev = detail::pd_factor(previous.query_cov, "row covariance");
  const auto llt_o_prev =
      detail::pd_factor(previous.object_cov, "column covariance");
  const auto llt_q = detail::pd_factor(query_cov, "row covariance");
  const auto llt_o = detail::pd_factor(object_cov, "column covariance");

  const Scalar log_terms =
      Scalar(0.5) *
      (Scalar(n) * (detail::log_det(llt_q_prev) - detail::log_det(llt_q)) +
       Scalar(m) * (detail::log_det(llt_o_prev) - detail::log_det(llt_o)));
  const MatrixX<Scalar> diff = mean - previous.mean;
  const MatrixX<Scalar> left = llt_q_prev.solve(diff);
  const MatrixX<Scalar> right = llt_o_prev.solve(diff.transpose());
  const Scalar mean_term =
      Scalar(0.5) * detail::trace_product(left, right.transpose());
  const Scalar hinge = std::max(Scalar(0), Scalar(1) - bilinear_score(q, mean, p));
  const Scalar hinge_term = hinge * hinge / (Scalar(2) * r);
  const Scalar coupling = Scalar(0.5) * llt_q_prev.solve(query_cov).trace() *
                          llt_o_prev.solve(object_cov).trace();
  const Scalar confidence =
      kron_quadratic_form(q, query_cov, p, object_cov) / (Scalar(2) * r);
  return log_terms + mean_term + hinge_term + coupling + confidence;
}

/// Cumulative hinge of a fixed comparator V over the selected rounds.
template <typename Scalar, typename Derived>
Scalar comparator_hinge(const Eigen::MatrixBase<Derived>& comparator,
                        const StepRecord<Scalar>& rec) {
  return std::max(Scalar(0),
                  Scalar(1) - bilinear_score(rec.query, comparator, rec.object));
}

/// Mistake-bound right-hand side for diagonal runs: cumulative comparator
/// hinge over M u U, the comparator norm inflated by the per-entry second
/// moments A_kl = sum q_k^2 p_l^2, and the log-capacity term, evaluated
/// literally including the -|U| and +2|U| corrections.
template <typename Scalar, typename Derived>
Scalar thm1_bound(const Eigen::MatrixBase<Derived>& comparator,
                  const RunTrace<Scalar>& trace) {
  if (trace.algo != Algo::d_aroma && trace.algo != Algo::arow_vec)
    throw DataError("theorem-1 bound needs a diagonal-run trace, got " +
                    to_string(trace.algo));
  require_dims(comparator.rows() == trace.rows && comparator.cols() == trace.cols,
               "theorem-1 bound: comparator shape mismatch");
  const Scalar r = trace.regularizer;
  MatrixX<Scalar> second_moment = MatrixX<Scalar>::Zero(trace.rows, trace.cols);
  Scalar hinge_sum = 0;
  Scalar margin_updates = 0;
  for (const auto& rec : trace.records) {
    if (!rec.mistake && !rec.margin_update) continue;
    hinge_sum += comparator_hinge(comparator, rec);
    if (rec.margin_update) margin_updates += Scalar(1);
    const auto qi = rec.query.indices();
    const auto qv = rec.query.values();
    const auto pi = rec.object.indices();
    const auto pv = rec.object.values();
    for (std::size_t a = 0; a < qi.size(); ++a)
      for (std::size_t b = 0; b < pi.size(); ++b)
        second_moment(qi[a], pi[b]) += qv[a] * qv[a] * pv[b] * pv[b];
  }
  Scalar weighted_norm = comparator.squaredNorm();
  Scalar log_capacity = 0;
  for (Index i = 0; i < trace.rows; ++i)
    for (Index j = 0; j < trace.cols; ++j) {
      weighted_norm +=
          comparator(i, j) * comparator(i, j) * second_moment(i, j) / r;
      log_capacity += std::log(second_moment(i, j) / r + Scalar(1));
    }
  return hinge_sum - margin_updates +
         std::sqrt(weighted_norm) * std::sqrt(r * log_capacity) +
         Scalar(2) * margin_updates;
}

/// Mistake-bound right-hand side for mistake-driven factored runs:
/// cumulative comparator hinge over M plus the whitened comparator norm
/// scaled by the smaller of the two log-volume contractions.
template <typename Scalar, typename Derived>
Scalar thm2_bound(const Eigen::MatrixBase<Derived>& comparator,
                  const RunTrace<Scalar>& trace) {
  if (trace.algo != Algo::f_aroma_analysis)
    throw DataError("theorem-2 bound needs a mistake-driven factored trace, got " +
                    to_string(trace.algo));
  if (!trace.final_object_cov || !trace.final_query_cov)
    throw DataError("theorem-2 bound: trace lacks the final covariances");
  require_dims(comparator.rows() == trace.rows && comparator.cols() == trace.cols,
               "theorem-2 bound: comparator shape mismatch");
  Scalar hinge_sum = 0;
  for (const auto& rec : trace.records)
    if (rec.mistake) hinge_sum += comparator_hinge(comparator, rec);

  const auto llt_o = detail::pd_factor(*trace.final_object_cov, "Omega_N");
  const auto llt_q = detail::pd_factor(*trace.final_query_cov, "Lambda_N");
  // Tr(V Omega_N^-1 V' Lambda_N^-1) without forming the inverses.
  const MatrixX<Scalar> o_inv_vt = llt_o.solve(comparator.transpose());
  const MatrixX<Scalar> q_inv_v = llt_q.solve(comparator);
  const Scalar whitened_norm =
      detail::trace_product(q_inv_v, o_inv_vt.transpose());
  const Scalar log_vol_object = -detail::log_det(llt_o);  // log det Omega_N^-1
  const Scalar log_vol_query = -detail::log_det(llt_q);
  const Scalar capacity =
      std::max(Scalar(0),
               trace.regularizer * std::min(Scalar(trace.rows) * log_vol_object,
                                            Scalar(trace.cols) * log_vol_query));
  return hinge_sum + Scalar(2) * std::sqrt(std::max(Scalar(0), whitened_norm)) *
                         std::sqrt(capacity);
}

template <typename Scalar>
struct Lemma3Result {
  Scalar lhs{};          // sum over updates of (q' Lambda_i q)(p' Omega_i p)
  Scalar rhs_object{};   // m r log det Omega_N^-1
  Scalar rhs_query{};    // n r log det Lambda_N^-1
  bool ok = false;
};

/// The telescoping inequality behind the factored mistake bound, evaluated
/// with the recorded post-update quadratic forms.
template <typename Scalar>
Lemma3Result<Scalar> lemma3_check(const RunTrace<Scalar>& trace) {
  if (trace.algo != Algo::f_aroma_analysis)
    throw DataError("lemma-3 check needs a mistake-driven factored trace, got " +
                    to_string(trace.algo));
  if (!trace.final_object_cov || !trace.final_query_cov)
    throw DataError("lemma-3 check: trace lacks the final covariances");
  Lemma3Result<Scalar> out;
  for (const auto& rec : trace.records) {
    if (!rec.updated) continue;
    out.lhs += rec.post_query_form * rec.post_object_form;
  }
  const auto llt_o = detail::pd_factor(*trace.final_object_cov, "Omega_N");
  const auto llt_q = detail::pd_factor(*trace.final_query_cov, "Lambda_N");
  out.rhs_object =
      Scalar(trace.rows) * trace.regularizer * -detail::log_det(llt_o);
  out.rhs_query =
      Scalar(trace.cols) * trace.regularizer * -detail::log_det(llt_q);
  const Scalar tol = Scalar(1e-8) * std::max(Scalar(1), std::abs(out.lhs));
  out.ok = out.lhs <= std::min(out.rhs_object, out.rhs_query) + tol;
  return out;
}

}  // namespace aroma
