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
#include "aroma/trace.hpp"
#include "aroma/types.hpp"

#include <span>
#include <utility>

namespace aroma {

/// Bilinear similarity learner with an elementwise confidence matrix:
/// the matrix counterpart of diagonal-covariance adaptive regularization.
/// Trains on triplets (q, p+, p-) against the margin q' W (p+ - p-) >= 1.
template <typename Scalar>
struct DiagonalModel {
  MatrixX<Scalar> mean;        // W
  MatrixX<Scalar> confidence;  // Sigma, elementwise, strictly positive
  Scalar regularizer{};        // r > 0

  static DiagonalModel initial(Index rows, Index cols, Scalar r,
                               Scalar confidence_init = Scalar(1)) {
    if (r <= Scalar(0)) throw DataError("regularizer must be positive");
    if (confidence_init <= Scalar(0))
      throw DataError("confidence must start positive");
    DiagonalModel m;
    m.mean = MatrixX<Scalar>::Zero(rows, cols);
    m.confidence = MatrixX<Scalar>::Constant(rows, cols, confidence_init);
    m.regularizer = r;
    return m;
  }

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }
};

/// max(0, 1 - q' W (p+ - p-)).
template <typename Scalar, typename Derived>
Scalar triplet_hinge(const Eigen::MatrixBase<Derived>& weights,
                     const Triplet<Scalar>& t) {
  const SparseVector<Scalar> diff = t.difference();
  return std::max(Scalar(0),
                  Scalar(1) - bilinear_score(t.query, weights, diff));
}

/// One online round. In margin mode the update fires when the margin is
/// below 1; in mistake mode only when the margin is non-positive (ties at
/// zero count as mistakes, which keeps the mistake set equal to the update
/// set and lets the first round update from W = 0). Both the mean and the
/// confidence touch only the nonzero support of q p', sharing the
/// denominator sum(q p' .* Sigma .* q p') + r.
template <typename Scalar>
StepRecord<Scalar> diag_step_inplace(DiagonalModel<Scalar>& model,
                                     const Triplet<Scalar>& t,
                                     UpdateMode mode = UpdateMode::margin) {
  require_dims(t.query.dim() == model.rows() &&
                   t.positive.dim() == model.cols() &&
                   t.negative.dim() == model.cols(),
               "diagonal step: triplet does not match a " +
                   std::to_string(model.rows()) + "x" +
                   std::to_string(model.cols()) + " model");
  StepRecord<Scalar> rec;
  rec.query = t.query;
  rec.object = t.difference();
  rec.margin = bilinear_score(rec.query, model.mean, rec.object);
  rec.hinge = std::max(Scalar(0), Scalar(1) - rec.margin);
  rec.mistake = rec.margin <= Scalar(0);
  const bool fire = mode == UpdateMode::margin ? rec.margin < Scalar(1)
                                               : rec.margin <= Scalar(0);
  if (!fire) return rec;

  const auto qi = rec.query.indices();
  const auto qv = rec.query.values();
  const auto pi = rec.object.indices();
  const auto pv = rec.object.values();

  double support_sum = 0;  // sum over the support of (q_k p_l)^2 Sigma_kl
  for (std::size_t a = 0; a < qi.size(); ++a) {
    double row = 0;
    for (std::size_t b = 0; b < pi.size(); ++b) {
      const double x = static_cast<double>(qv[a]) * pv[b];
      row += x * x * static_cast<double>(model.confidence(qi[a], pi[b]));
    }
    support_sum += row;
  }
  rec.denominator = static_cast<Scalar>(support_sum) + model.regularizer;
  const Scalar rate = rec.hinge / rec.denominator;

  for (std::size_t a = 0; a < qi.size(); ++a) {
    for (std::size_t b = 0; b < pi.size(); ++b) {
      const Index k = qi[a];
      const Index l = pi[b];
      const Scalar x = qv[a] * pv[b];
      const Scalar sigma = model.confidence(k, l);
      model.mean(k, l) += rate * sigma * x;
      model.confidence(k, l) = sigma - sigma * x * x * sigma / rec.denominator;
    }
  }
  rec.touched = static_cast<std::int64_t>(qi.size() * pi.size());
  rec.updated = true;
  rec.margin_update = rec.margin > Scalar(0);
  return rec;
}

template <typename Scalar>
std::pair<DiagonalModel<Scalar>, StepRecord<Scalar>> diag_step(
    const DiagonalModel<Scalar>& model, const Triplet<Scalar>& t,
    UpdateMode mode = UpdateMode::margin) {
  DiagonalModel<Scalar> next = model;
  auto rec = diag_step_inplace(next, t, mode);
  return {std::move(next), std::move(rec)};
}

/// Folds diag_step over the stream, tagging failures with the round index.
template <typename Scalar>
std::pair<DiagonalModel<Scalar>, RunTrace<Scalar>> diag_train(
    DiagonalModel<Scalar> model, std::span<const Triplet<Scalar>> stream,
    UpdateMode mode = UpdateMode::margin) {
  RunTrace<Scalar> trace;
  trace.algo = Algo::d_aroma;
  trace.mode = mode;
  trace.rows = model.rows();
  trace.cols = model.cols();
  trace.regularizer = model.regularizer;
  std::int64_t round = 0;
  for (const auto& t : stream) {
    ++round;
    try {
      auto rec = diag_step_inplace(model, t, mode);
      rec.round = round;
      trace.records.push_back(std::move(rec));
    } catch (const DimensionError& e) {
      throw DimensionError("round " + std::to_string(round) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("round " + std::to_string(round) + ": " + e.what());
    }
  }
  trace.final_confidence = model.confidence;
  return {std::move(model), std::move(trace)};
}

}  // namespace aroma
