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

#include "aroma/corpus.hpp"
#include "aroma/random.hpp"
#include "aroma/types.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace aroma {

/// Seeded stream of ranking triplets from class labels: the preferred
/// object shares the query's label, the other never does. A fixed seed and
/// corpus reproduce the exact sequence; draws are consumed in the documented
/// order (query, then preferred, then other) so shards can be cloned.
///
/// The query side and the object side may be different corpora (asymmetric
/// similarity); when they are the same corpus the query is excluded from its
/// own positive pool.
class TripletSampler {
 public:
  TripletSampler(const LabeledCorpus& corpus, std::uint64_t seed)
      : TripletSampler(corpus, corpus, seed) {}

  TripletSampler(const LabeledCorpus& queries, const LabeledCorpus& objects,
                 std::uint64_t seed)
      : queries_(&queries), objects_(&objects),
        same_corpus_(&queries == &objects), gen_(seed) {
    if (queries.size() == 0 || objects.size() == 0)
      throw DataError("triplet sampling needs non-empty corpora");
    std::map<std::string, std::vector<Index>> groups;
    for (Index i = 0; i < objects.size(); ++i)
      groups[objects.examples[i].label].push_back(i);
    for (auto& [label, members] : groups) {
      const Index group_id = static_cast<Index>(members_.size());
      label_ids_.emplace(label, group_id);
      members_.push_back(std::move(members));
    }
    complements_.resize(members_.size());
    for (std::size_t g = 0; g < members_.size(); ++g) {
      complements_[g].reserve(objects.size() - members_[g].size());
      for (Index i = 0; i < objects.size(); ++i)
        if (objects.examples[i].label !=
            objects.examples[members_[g][0]].label)
          complements_[g].push_back(i);
    }
  }

  struct Drawn {
    Index query = 0;     // index into the query corpus
    Index positive = 0;  // indices into the object corpus
    Index negative = 0;
  };

  /// Draws the next triplet's indices. A query whose label has no usable
  /// positive pool is redrawn a bounded number of times before failing.
  Drawn next_indices() {
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      Drawn d;
      d.query = static_cast<Index>(
          uniform_below(gen_, static_cast<std::uint64_t>(queries_->size())));
      const auto group_it = label_ids_.find(queries_->examples[d.query].label);
      if (group_it == label_ids_.end()) continue;  // label absent object-side
      const Index group = group_it->second;
      const auto& positives = members_[group];
      const auto& negatives = complements_[group];
      // position of the query inside its own group, when it is in it
      Index self_pos = -1;
      if (same_corpus_) {
        const auto it =
            std::lower_bound(positives.begin(), positives.end(), d.query);
        if (it != positives.end() && *it == d.query)
          self_pos = static_cast<Index>(it - positives.begin());
      }
      const std::uint64_t pool =
          positives.size() - (self_pos >= 0 ? 1 : 0);
      if (pool == 0 || negatives.empty()) continue;
      std::uint64_t pos_draw = uniform_below(gen_, pool);
      if (self_pos >= 0 && pos_draw >= static_cast<std::uint64_t>(self_pos))
        ++pos_draw;
      d.positive = positives[pos_draw];
      d.negative = negatives[uniform_below(
          gen_, static_cast<std::uint64_t>(negatives.size()))];
      return d;
    }
    throw DataError(
        "triplet sampling failed: no label with both a positive and a "
        "negative pool was drawn in " +
        std::to_string(kMaxRetries) + " attempts");
  }

  Triplet<Real> next() {
    const Drawn d = next_indices();
    return {queries_->examples[d.query].features,
            objects_->examples[d.positive].features,
            objects_->examples[d.negative].features};
  }

 private:
  static constexpr int kMaxRetries = 1000;

  const LabeledCorpus* queries_;
  const LabeledCorpus* objects_;
  bool same_corpus_;
  std::mt19937_64 gen_;
  std::map<std::string, Index> label_ids_;
  std::vector<std::vector<Index>> members_;      // object indices per label
  std::vector<std::vector<Index>> complements_;  // object indices not in label
};

}  // namespace aroma
