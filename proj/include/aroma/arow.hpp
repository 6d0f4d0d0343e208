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

#include "aroma/linalg.hpp"
#include "aroma/types.hpp"

#include <Eigen/Cholesky>

#include <optional>
#include <utility>

namespace aroma {

/// Adaptive-regularization learner for binary classification of vectors:
/// a Gaussian N(w, Sigma) over weight vectors whose mean predicts and whose
/// covariance sets per-feature learning rates. The covariance is either a
/// full d x d matrix (small dimensions, used by the tests) or its diagonal.
template <typename Scalar>
struct ArowModel {
  VectorX<Scalar> weights;                     // w
  std::optional<MatrixX<Scalar>> full_cov;     // Sigma, full mode
  std::optional<VectorX<Scalar>> diag_cov;     // sigma, diagonal mode
  Scalar regularizer{};                        // r > 0

  static ArowModel full(Index dim, Scalar r) {
    if (r <= Scalar(0)) throw DataError("regularizer must be positive");
    ArowModel m;
    m.weights = VectorX<Scalar>::Zero(dim);
    m.full_cov = MatrixX<Scalar>::Identity(dim, dim);
    m.regularizer = r;
    return m;
  }

  static ArowModel diagonal(Index dim, Scalar r) {
    if (r <= Scalar(0)) throw DataError("regularizer must be positive");
    ArowModel m;
    m.weights = VectorX<Scalar>::Zero(dim);
    m.diag_cov = VectorX<Scalar>::Ones(dim);
    m.regularizer = r;
    return m;
  }

  bool is_full() const { return full_cov.has_value(); }
  Index dim() const { return weights.size(); }
};

/// sign(w . x); a tie at exactly zero predicts +1.
template <typename Scalar>
int arow_predict(const ArowModel<Scalar>& model, const SparseVector<Scalar>& x) {
  require_dims(x.dim() == model.dim(), "predict: dimension mismatch");
  return x.dot(model.weights) < Scalar(0) ? -1 : +1;
}

template <typename Scalar>
struct ArowStepInfo {
  Scalar margin{};       // y * x' w before the update
  Scalar hinge{};        // max(0, 1 - margin)
  Scalar denominator{};  // x' Sigma x + r
  bool updated = false;
};

/// One online round. Zero-hinge inputs leave the model bit-identical;
/// otherwise the mean moves along Sigma y x and the covariance shrinks by
/// the rank-1 (or elementwise) confidence downdate sharing one denominator.
template <typename Scalar>
ArowStepInfo<Scalar> arow_update_inplace(ArowModel<Scalar>& model,
                                         const SparseVector<Scalar>& x,
                                         int label) {
  require_dims(x.dim() == model.dim(), "update: dimension mismatch");
  const Scalar y = label < 0 ? Scalar(-1) : Scalar(1);
  ArowStepInfo<Scalar> info;
  info.margin = y * x.dot(model.weights);
  info.hinge = std::max(Scalar(0), Scalar(1) - info.margin);
  if (info.hinge == Scalar(0)) {
    info.denominator = Scalar(0);
    return info;
  }

  if (model.is_full()) {
    MatrixX<Scalar>& cov = *model.full_cov;
    const VectorX<Scalar> cx = dense_times_sparse(cov, x);
    const Scalar quad = x.dot(cx);
    info.denominator = quad + model.regularizer;
    model.weights.noalias() += (info.hinge / info.denominator) * y * cx;
    cov.noalias() -= (cx * cx.transpose()) / info.denominator;
    symmetrize(cov);
  } else {
    VectorX<Scalar>& cov = *model.diag_cov;
    const auto xi = x.indices();
    const auto xv = x.values();
    double quad = 0;
    for (std::size_t t = 0; t < xi.size(); ++t)
      quad += static_cast<double>(cov(xi[t])) * xv[t] * xv[t];
    info.denominator = static_cast<Scalar>(quad) + model.regularizer;
    const Scalar rate = info.hinge / info.denominator;
    for (std::size_t t = 0; t < xi.size(); ++t) {
      const Index i = xi[t];
      const Scalar sx = cov(i) * xv[t];
      model.weights(i) += rate * y * sx;
      cov(i) -= sx * sx / info.denominator;
    }
  }
  info.updated = true;
  return info;
}

template <typename Scalar>
std::pair<ArowModel<Scalar>, ArowStepInfo<Scalar>> arow_update(
    const ArowModel<Scalar>& model, const SparseVector<Scalar>& x, int label) {
  ArowModel<Scalar> next = model;
  const auto info = arow_update_inplace(next, x, label);
  return {std::move(next), info};
}

/// Exact KL divergence between Gaussians N(mean0, cov0) || N(mean1, cov1).
template <typename Scalar>
Scalar gaussian_kl(const VectorX<Scalar>& mean0, const MatrixX<Scalar>& cov0,
                   const VectorX<Scalar>& mean1, const MatrixX<Scalar>& cov1) {
  const Index d = mean0.size();
  require_dims(mean1.size() == d && cov0.rows() == d && cov0.cols() == d &&
                   cov1.rows() == d && cov1.cols() == d,
               "gaussian kl: dimension mismatch");
  const Eigen::LLT<MatrixX<Scalar>> llt0(cov0);
  const Eigen::LLT<MatrixX<Scalar>> llt1(cov1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success)
    throw NumericalError("gaussian kl: covariance not positive definite");
  auto log_det = [](const Eigen::LLT<MatrixX<Scalar>>& llt) {
    Scalar acc = 0;
    const auto& l = llt.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
    return Scalar(2) * acc;
  };
  const VectorX<Scalar> diff = mean1 - mean0;
  const Scalar trace_term = llt1.solve(cov0).trace();
  const Scalar quad = diff.dot(llt1.solve(diff));
  return Scalar(0.5) * (log_det(llt1) - log_det(llt0) - Scalar(d) + trace_term + quad);
}

/// The per-round objective the update minimizes: KL to the previous Gaussian
/// plus squared hinge and confidence terms scaled by 1/(2r). Full mode only.
template <typename Scalar>
Scalar arow_objective(const VectorX<Scalar>& weights, const MatrixX<Scalar>& cov,
                      const ArowModel<Scalar>& previous,
                      const SparseVector<Scalar>& x, int label, Scalar r) {
  if (!previous.is_full())
    throw DataError("objective evaluation requires a full-covariance model");
  require_dims(weights.size() == previous.dim() && x.dim() == previous.dim(),
               "objective: dimension mismatch");
  const Scalar y = label < 0 ? Scalar(-1) : Scalar(1);
  const Scalar kl = gaussian_kl(weights, cov, previous.weights, *previous.full_cov);
  const Scalar hinge = std::max(Scalar(0), Scalar(1) - y * x.dot(weights));
  const Scalar confidence = sparse_quad_form(x, cov);
  return kl + hinge * hinge / (Scalar(2) * r) + confidence / (Scalar(2) * r);
}

}  // namespace aroma
