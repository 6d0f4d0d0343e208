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

#include <iosfwd>
#include <string>
#include <vector>

namespace aroma {

struct Example {
  std::string id;
  std::string label;
  SparseVector<Real> features;
};

/// Class-labeled sparse examples sharing one feature space.
struct LabeledCorpus {
  Index dim = 0;
  std::vector<Example> examples;

  Index size() const { return static_cast<Index>(examples.size()); }
};

/// Parses the corpus text format:
///   dim <d>
///   <id> <label> <index>:<value> ...
/// Indices are 0-based and strictly increasing per line; '#' lines are
/// comments. Errors carry the offending line number.
LabeledCorpus parse_corpus(std::istream& in);
LabeledCorpus load_corpus(const std::string& path);

void write_corpus(const LabeledCorpus& corpus, std::ostream& out);
void save_corpus(const LabeledCorpus& corpus, const std::string& path);

/// count * ln(N / df) weighting followed by per-document l2 normalization.
/// Terms present in every document get weight zero and drop out.
LabeledCorpus tfidf_transform(const LabeledCorpus& corpus);

struct SelectionResult {
  LabeledCorpus corpus;        // reindexed to the kept features
  std::vector<Index> kept;     // kept[new_index] = original index, ascending
  std::vector<Real> gain;      // information gain per original feature
};

/// Keeps the k features with the highest class information gain
/// (presence/absence binarization, natural-log entropy). Ties go to the
/// lower original index; kept features are reindexed densely preserving
/// their original order.
SelectionResult infogain_select(const LabeledCorpus& corpus, Index k);

}  // namespace aroma
