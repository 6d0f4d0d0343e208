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

// Synthetic retrieval task for the integration tests: a handful of class
// indicator coordinates carrying a weak signal, drowned for the plain inner
// product by high-variance nuisance coordinates. A known comparator matrix
// that reads only the indicator block separates the classes with a wide
// margin, so the task is learnable and the identity baseline is near chance.

#pragma once

#include "aroma/corpus.hpp"
#include "aroma/types.hpp"

#include "test_support.hpp"

#include <string>

namespace aroma::testing {

struct SyntheticConfig {
  Index dim = 20;
  Index classes = 5;        // class c marks indicator coordinate c
  Index docs_per_class = 0;
  double indicator_noise = 0.2;
  double nuisance_noise = 1.5;
  double comparator_scale = 2.0;
  std::uint64_t seed = 0;
};

inline LabeledCorpus synthetic_corpus(const SyntheticConfig& cfg) {
  std::mt19937_64 g(cfg.seed);
  LabeledCorpus corpus;
  corpus.dim = cfg.dim;
  for (Index c = 0; c < cfg.classes; ++c) {
    for (Index d = 0; d < cfg.docs_per_class; ++d) {
      VectorX<double> x = VectorX<double>::Zero(cfg.dim);
      for (Index f = 0; f < cfg.classes; ++f)
        x(f) = (f == c ? 1.0 : 0.0) + cfg.indicator_noise * gaussian_draw(g);
      for (Index f = cfg.classes; f < cfg.dim; ++f)
        x(f) = cfg.nuisance_noise * gaussian_draw(g);
      Example ex;
      ex.id = "doc" + std::to_string(c) + "_" + std::to_string(d);
      ex.label = "class" + std::to_string(c);
      ex.features = SparseVector<double>::from_dense(x);
      corpus.examples.push_back(std::move(ex));
    }
  }
  return corpus;
}

/// The generating similarity: reads the indicator block only. Same-class
/// pairs score ~comparator_scale, cross-class pairs ~0.
inline MatrixX<double> synthetic_comparator(const SyntheticConfig& cfg) {
  MatrixX<double> v = MatrixX<double>::Zero(cfg.dim, cfg.dim);
  for (Index c = 0; c < cfg.classes; ++c) v(c, c) = cfg.comparator_scale;
  return v;
}

}  // namespace aroma::testing
