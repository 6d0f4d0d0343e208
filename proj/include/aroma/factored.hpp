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

#include <optional>
#include <span>
#include <utility>

namespace aroma {

enum class FactoredMode { standard, analysis };

/// Bilinear similarity learner whose confidence over vec(W) factors into a
/// query-side covariance Lambda (m x m) and an object-side covariance Omega
/// (n x n), keeping the parameter count at mn + m^2 + n^2.
///
/// standard mode: margin-gated; the mean update uses the pre-update
/// covariances.
/// analysis mode: mistake-gated (margin <= 0, so the mistake set equals the
/// update set) and the mean recursion is kept in whitened form
/// Lambda^-1 W Omega^-1, which absorbs each step's rank-1 increment and is
/// re-colored with the post-update covariances.
template <typename Scalar>
struct FactoredModel {
  MatrixX<Scalar> mean;           // W
  MatrixX<Scalar> object_cov;     // Omega, n x n
  MatrixX<Scalar> query_cov;      // Lambda, m x m
  Scalar regularizer{};           // r > 0
  FactoredMode mode = FactoredMode::standard;
  MatrixX<Scalar> whitened_mean;  // Lambda^-1 W Omega^-1; analysis mode only

  static FactoredModel initial(Index rows, Index cols, Scalar r,
                               FactoredMode mode = FactoredMode::standard) {
    if (r <= Scalar(0)) throw DataError("regularizer must be positive");
    FactoredModel m;
    m.mean = MatrixX<Scalar>::Zero(rows, cols);
    m.object_cov = MatrixX<Scalar>::Identity(cols, cols);
    m.query_cov = MatrixX<Scalar>::Identity(rows, rows);
    m.regularizer = r;
    m.mode = mode;
    if (mode == FactoredMode::analysis)
      m.whitened_mean = MatrixX<Scalar>::Zero(rows, cols);
    return m;
  }

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }
};

/// One online round; see FactoredModel for the two gating modes. Records the
/// covariance quadratic forms before and after the update.
template <typename Scalar>
StepRecord<Scalar> factored_step_inplace(FactoredModel<Scalar>& model,
                                         const Triplet<Scalar>& t) {
  require_dims(t.query.dim() == model.rows() &&
                   t.positive.dim() == model.cols() &&
                   t.negative.dim() == model.cols(),
               "factored step: triplet does not match a " +
                   std::to_string(model.rows()) + "x" +
                   std::to_string(model.cols()) + " model");
  StepRecord<Scalar> rec;
  rec.query = t.query;
  rec.object = t.difference();
  rec.margin = bilinear_score(rec.query, model.mean, rec.object);
  rec.hinge = std::max(Scalar(0), Scalar(1) - rec.margin);
  rec.mistake = rec.margin <= Scalar(0);

  const Scalar query_form = sparse_quad_form(rec.query, model.query_cov);
  const Scalar object_form = sparse_quad_form(rec.object, model.object_cov);
  if (query_form < Scalar(0) || object_form < Scalar(0))
    throw NumericalError(
        "factored step: covariance lost positive definiteness (q'Lq = " +
        std::to_string(static_cast<double>(query_form)) + ", p'Op = " +
        std::to_string(static_cast<double>(object_form)) + ")");
  rec.pre_query_form = query_form;
  rec.pre_object_form = object_form;
  rec.post_query_form = query_form;
  rec.post_object_form = object_form;

  const bool fire = model.mode == FactoredMode::standard
                        ? rec.margin < Scalar(1)
                        : rec.margin <= Scalar(0);
  if (!fire) return rec;

  const Index m = model.rows();
  const Index n = model.cols();
  const Scalar r = model.regularizer;
  const Scalar coupled = query_form * object_form;
  const VectorX<Scalar> lq = dense_times_sparse(model.query_cov, rec.query);
  const VectorX<Scalar> op = dense_times_sparse(model.object_cov, rec.object);
  rec.denominator = r + coupled;

  if (model.mode == FactoredMode::standard) {
    model.mean.noalias() += (rec.hinge / rec.denominator) * lq * op.transpose();
  }

  // Confidence downdates; a degenerate side leaves the other side untouched.
  if (query_form > Scalar(0)) {
    model.object_cov.noalias() -=
        (query_form / (Scalar(m) * r + coupled)) * op * op.transpose();
    symmetrize(model.object_cov);
  }
  if (object_form > Scalar(0)) {
    model.query_cov.noalias() -=
        (object_form / (Scalar(n) * r + coupled)) * lq * lq.transpose();
    symmetrize(model.query_cov);
  }

  if (model.mode == FactoredMode::analysis) {
    const Scalar rate = rec.hinge / rec.denominator;
    const auto qi = rec.query.indices();
    const auto qv = rec.query.values();
    const auto pi = rec.object.indices();
    const auto pv = rec.object.values();
    for (std::size_t a = 0; a < qi.size(); ++a)
      for (std::size_t b = 0; b < pi.size(); ++b)
        model.whitened_mean(qi[a], pi[b]) += rate * qv[a] * pv[b];
    model.mean.noalias() =
        model.query_cov * model.whitened_mean * model.object_cov;
  }

  rec.post_query_form = sparse_quad_form(rec.query, model.query_cov);
  rec.post_object_form = sparse_quad_form(rec.object, model.object_cov);
  rec.touched = static_cast<std::int64_t>(m) * n;
  rec.updated = true;
  rec.margin_update = rec.margin > Scalar(0);
  return rec;
}

template <typename Scalar>
std::pair<FactoredModel<Scalar>, StepRecord<Scalar>> factored_step(
    const FactoredModel<Scalar>& model, const Triplet<Scalar>& t) {
  FactoredModel<Scalar> next = model;
  auto rec = factored_step_inplace(next, t);
  return {std::move(next), std::move(rec)};
}

/// Folds factored_step over the stream; the trace keeps the per-round
/// quadratic forms and the final covariances the mistake bound needs.
template <typename Scalar>
std::pair<FactoredModel<Scalar>, RunTrace<Scalar>> factored_train(
    FactoredModel<Scalar> model, std::span<const Triplet<Scalar>> stream) {
  RunTrace<Scalar> trace;
  trace.algo = model.mode == FactoredMode::analysis ? Algo::f_aroma_analysis
                                                    : Algo::f_aroma;
  trace.mode = model.mode == FactoredMode::analysis ? UpdateMode::mistake
                                                    : UpdateMode::margin;
  trace.rows = model.rows();
  trace.cols = model.cols();
  trace.regularizer = model.regularizer;
  std::int64_t round = 0;
  for (const auto& t : stream) {
    ++round;
    try {
      auto rec = factored_step_inplace(model, t);
      rec.round = round;
      trace.records.push_back(std::move(rec));
    } catch (const DimensionError& e) {
      throw DimensionError("round " + std::to_string(round) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("round " + std::to_string(round) + ": " + e.what());
    }
  }
  trace.final_object_cov = model.object_cov;
  trace.final_query_cov = model.query_cov;
  return {std::move(model), std::move(trace)};
}

template <typename Scalar>
struct EffectiveRates {
  std::optional<Scalar> object_side;  // m r / (q' Lambda q), damps Omega
  std::optional<Scalar> query_side;   // n r / (p' Omega p), damps Lambda
};

/// The data-dependent regularizers that replace the scalar r in the two
/// covariance downdates. A vanishing quadratic form means the matching
/// covariance would not move at all, reported as an absent rate.
template <typename Scalar>
EffectiveRates<Scalar> effective_rate_report(const FactoredModel<Scalar>& model,
                                             const Triplet<Scalar>& t) {
  const SparseVector<Scalar> diff = t.difference();
  const Scalar query_form = sparse_quad_form(t.query, model.query_cov);
  const Scalar object_form = sparse_quad_form(diff, model.object_cov);
  EffectiveRates<Scalar> rates;
  if (query_form > Scalar(0))
    rates.object_side =
        Scalar(model.rows()) * model.regularizer / query_form;
  if (object_form > Scalar(0))
    rates.query_side = Scalar(model.cols()) * model.regularizer / object_form;
  return rates;
}

}  // namespace aroma
