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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aroma {

enum class Algo { d_aroma, f_aroma, f_aroma_analysis, arow_vec, pa, identity };
enum class UpdateMode { margin, mistake };

std::string to_string(Algo algo);
std::string to_string(UpdateMode mode);
Algo algo_from_string(const std::string& name);
UpdateMode update_mode_from_string(const std::string& name);

/// Everything one training round contributes to the mistake-bound checks.
template <typename Scalar>
struct StepRecord {
  std::int64_t round = 0;        // 1-based position in the stream
  SparseVector<Scalar> query;    // q
  SparseVector<Scalar> object;   // p = p+ - p-
  Scalar margin{};               // q' W p before the update
  Scalar hinge{};                // max(0, 1 - margin)
  bool updated = false;
  bool mistake = false;          // margin <= 0 (set M)
  bool margin_update = false;    // updated with 0 < margin < 1 (set U)
  Scalar denominator{};          // shared update denominator, 0 when skipped
  // Covariance quadratic forms around the update (factored runs only).
  Scalar pre_query_form{};       // q' Lambda_{i-1} q
  Scalar pre_object_form{};      // p' Omega_{i-1} p
  Scalar post_query_form{};      // q' Lambda_i q
  Scalar post_object_form{};     // p' Omega_i p
  std::int64_t touched = 0;      // entries of W/Sigma written
};

/// A recorded run plus the final confidence state the bounds need.
template <typename Scalar>
struct RunTrace {
  Algo algo = Algo::d_aroma;
  UpdateMode mode = UpdateMode::margin;
  Index rows = 0;  // m
  Index cols = 0;  // n
  Scalar regularizer{};
  std::vector<StepRecord<Scalar>> records;
  std::optional<MatrixX<Scalar>> final_confidence;  // Sigma_N (diagonal runs)
  std::optional<MatrixX<Scalar>> final_object_cov;  // Omega_N (factored runs)
  std::optional<MatrixX<Scalar>> final_query_cov;   // Lambda_N (factored runs)

  std::int64_t mistakes() const {
    std::int64_t n = 0;
    for (const auto& r : records) n += r.mistake ? 1 : 0;
    return n;
  }
  std::int64_t margin_updates() const {
    std::int64_t n = 0;
    for (const auto& r : records) n += r.margin_update ? 1 : 0;
    return n;
  }
};

inline std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::d_aroma: return "d-aroma";
    case Algo::f_aroma: return "f-aroma";
    case Algo::f_aroma_analysis: return "f-aroma-analysis";
    case Algo::arow_vec: return "arow-vec";
    case Algo::pa: return "pa";
    case Algo::identity: return "identity";
  }
  return "?";
}

inline std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::margin ? "margin" : "mistake";
}

inline Algo algo_from_string(const std::string& name) {
  if (name == "d-aroma") return Algo::d_aroma;
  if (name == "f-aroma") return Algo::f_aroma;
  if (name == "f-aroma-analysis") return Algo::f_aroma_analysis;
  if (name == "arow-vec") return Algo::arow_vec;
  if (name == "pa") return Algo::pa;
  if (name == "identity") return Algo::identity;
  throw DataError("unknown algorithm '" + name + "'");
}

inline UpdateMode update_mode_from_string(const std::string& name) {
  if (name == "margin") return UpdateMode::margin;
  if (name == "mistake") return UpdateMode::mistake;
  throw DataError("unknown update mode '" + name + "'");
}

}  // namespace aroma
