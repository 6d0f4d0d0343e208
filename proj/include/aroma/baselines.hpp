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

namespace aroma {

/// First-order passive-aggressive baseline on the triplet hinge: a capped
/// rank-1 step along q p' with no confidence state.
template <typename Scalar>
struct PaModel {
  MatrixX<Scalar> mean;       // W
  Scalar aggressiveness{};    // cap C on the step size

  static PaModel initial(Index rows, Index cols, Scalar aggressiveness) {
    if (aggressiveness <= Scalar(0))
      throw DataError("aggressiveness must be positive");
    PaModel m;
    m.mean = MatrixX<Scalar>::Zero(rows, cols);
    m.aggressiveness = aggressiveness;
    return m;
  }

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }
};

template <typename Scalar>
StepRecord<Scalar> pa_step_inplace(PaModel<Scalar>& model,
                                   const Triplet<Scalar>& t) {
  require_dims(t.query.dim() == model.rows() &&
                   t.positive.dim() == model.cols() &&
                   t.negative.dim() == model.cols(),
               "pa step: triplet does not match the model shape");
  StepRecord<Scalar> rec;
  rec.query = t.query;
  rec.object = t.difference();
  rec.margin = bilinear_score(rec.query, model.mean, rec.object);
  rec.hinge = std::max(Scalar(0), Scalar(1) - rec.margin);
  rec.mistake = rec.margin <= Scalar(0);
  if (rec.hinge == Scalar(0)) return rec;
  const Scalar norm_sq = rec.query.squared_norm() * rec.object.squared_norm();
  if (norm_sq == Scalar(0)) return rec;  // no direction to move along
  const Scalar tau = std::min(model.aggressiveness, rec.hinge / norm_sq);
  rec.denominator = norm_sq;
  const auto qi = rec.query.indices();
  const auto qv = rec.query.values();
  const auto pi = rec.object.indices();
  const auto pv = rec.object.values();
  for (std::size_t a = 0; a < qi.size(); ++a)
    for (std::size_t b = 0; b < pi.size(); ++b)
      model.mean(qi[a], pi[b]) += tau * qv[a] * pv[b];
  rec.touched = static_cast<std::int64_t>(qi.size() * pi.size());
  rec.updated = true;
  rec.margin_update = rec.margin > Scalar(0);
  return rec;
}

/// The no-training baseline: W = I (rectangular identity when m != n).
template <typename Scalar>
MatrixX<Scalar> identity_weights(Index rows, Index cols) {
  return MatrixX<Scalar>::Identity(rows, cols);
}

}  // namespace aroma
