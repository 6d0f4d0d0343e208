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

#include "aroma/trace.hpp"
#include "aroma/types.hpp"

#include <optional>
#include <string>

namespace aroma {

/// One on-disk schema for every learner variant: the scoring matrix plus the
/// variant's confidence state. JSON with nested row-major arrays; numbers
/// round-trip at full precision, so saving and reloading is lossless and a
/// fixed seed reproduces files byte for byte.
struct StoredModel {
  Algo variant = Algo::d_aroma;
  Index rows = 0;   // m
  Index cols = 0;   // n
  Real regularizer = 0;
  MatrixX<Real> mean;                          // W, always present
  std::optional<MatrixX<Real>> confidence;     // Sigma (d-aroma, arow-vec)
  std::optional<MatrixX<Real>> object_cov;     // Omega (f-aroma)
  std::optional<MatrixX<Real>> query_cov;      // Lambda (f-aroma)
};

void save_model(const StoredModel& model, const std::string& path);
StoredModel load_model(const std::string& path);

}  // namespace aroma
