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
#include "aroma/linalg.hpp"
#include "aroma/types.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <unordered_set>
#include <vector>

namespace aroma {

/// Candidate indices sorted by descending bilinear score q' W p; ties break
/// by ascending candidate id so rankings are deterministic. `exclude` drops
/// one candidate (the query itself in leave-query-out evaluation).
template <typename Derived>
std::vector<Index> rank_candidates(const Eigen::MatrixBase<Derived>& weights,
                                   const SparseVector<Real>& query,
                                   const LabeledCorpus& candidates,
                                   Index exclude = -1) {
  std::vector<std::pair<Real, Index>> scored;
  scored.reserve(candidates.size());
  for (Index j = 0; j < candidates.size(); ++j) {
    if (j == exclude) continue;
    scored.emplace_back(
        bilinear_score(query, weights, candidates.examples[j].features), j);
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return candidates.examples[a.second].id < candidates.examples[b.second].id;
  });
  std::vector<Index> out;
  out.reserve(scored.size());
  for (const auto& [score, j] : scored) out.push_back(j);
  return out;
}

/// Fraction of relevant candidates among the top k.
inline Real precision_at_k(std::span<const Index> ranking,
                           const std::unordered_set<Index>& relevant,
                           Index k) {
  if (k < 1 || k > static_cast<Index>(ranking.size()))
    throw DataError("precision@k: k = " + std::to_string(k) +
                    " out of range for a ranking of " +
                    std::to_string(ranking.size()));
  Index hits = 0;
  for (Index i = 0; i < k; ++i) hits += relevant.count(ranking[i]) ? 1 : 0;
  return static_cast<Real>(hits) / static_cast<Real>(k);
}

/// Mean of the precision values taken at each relevant item's rank.
/// Returns -1 when the relevant set does not intersect the ranking.
inline Real average_precision(std::span<const Index> ranking,
                              const std::unordered_set<Index>& relevant) {
  Index hits = 0;
  Real acc = 0;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    if (!relevant.count(ranking[pos])) continue;
    ++hits;
    acc += static_cast<Real>(hits) / static_cast<Real>(pos + 1);
  }
  if (hits == 0) return Real(-1);
  return acc / static_cast<Real>(hits);
}

struct EvalReport {
  std::vector<Index> k_values;
  std::vector<Real> precision_at_k;
  Real mean_average_precision = 0;
  Index queries_evaluated = 0;
  Index queries_skipped = 0;  // queries with no same-label candidate
};

/// Leave-query-out ranking evaluation over a labeled corpus: every example
/// queries the rest, relevance means sharing the query's label. Queries with
/// an empty relevant pool are skipped and counted.
template <typename Derived>
EvalReport evaluate_ranking(const Eigen::MatrixBase<Derived>& weights,
                            const LabeledCorpus& corpus,
                            std::span<const Index> k_values) {
  require_dims(weights.rows() == corpus.dim && weights.cols() == corpus.dim,
               "evaluation: model is " + std::to_string(weights.rows()) + "x" +
                   std::to_string(weights.cols()) + " but the corpus dim is " +
                   std::to_string(corpus.dim));
  for (const Index k : k_values)
    if (k < 1 || k >= corpus.size())
      throw DataError("precision@k: k = " + std::to_string(k) +
                      " out of range for " + std::to_string(corpus.size()) +
                      " candidates");
  EvalReport report;
  report.k_values.assign(k_values.begin(), k_values.end());
  report.precision_at_k.assign(k_values.size(), 0);
  Real ap_sum = 0;
  for (Index q = 0; q < corpus.size(); ++q) {
    std::unordered_set<Index> relevant;
    for (Index j = 0; j < corpus.size(); ++j)
      if (j != q && corpus.examples[j].label == corpus.examples[q].label)
        relevant.insert(j);
    if (relevant.empty()) {
      ++report.queries_skipped;
      continue;
    }
    const auto ranking =
        rank_candidates(weights, corpus.examples[q].features, corpus, q);
    for (std::size_t t = 0; t < report.k_values.size(); ++t)
      report.precision_at_k[t] +=
          precision_at_k(ranking, relevant, report.k_values[t]);
    ap_sum += average_precision(ranking, relevant);
    ++report.queries_evaluated;
  }
  if (report.queries_evaluated > 0) {
    for (auto& p : report.precision_at_k) p /= report.queries_evaluated;
    report.mean_average_precision = ap_sum / report.queries_evaluated;
  }
  return report;
}

struct TracePoint {
  std::int64_t iteration = 0;
  Real precision = 0;
};

/// Precision@k measured at training checkpoints. `advance(count)` runs the
/// learner forward; `weights()` exposes the current scoring matrix. The
/// evaluation itself never touches learner state, and the schedule must be
/// strictly increasing.
template <typename AdvanceFn, typename WeightsFn>
std::vector<TracePoint> precision_trace(std::span<const std::int64_t> schedule,
                                        AdvanceFn&& advance,
                                        WeightsFn&& weights,
                                        const LabeledCorpus& eval_corpus,
                                        Index k) {
  std::vector<TracePoint> points;
  std::int64_t position = 0;
  std::int64_t last = -1;
  for (const std::int64_t checkpoint : schedule) {
    if (checkpoint <= last || checkpoint < 0)
      throw DataError("checkpoint schedule must be strictly increasing");
    last = checkpoint;
    advance(checkpoint - position);
    position = checkpoint;
    const std::vector<Index> ks{k};
    const auto report = evaluate_ranking(weights(), eval_corpus, ks);
    points.push_back({checkpoint, report.precision_at_k.at(0)});
  }
  return points;
}

/// CSV emission for precision-vs-iteration traces.
inline void write_trace_report(std::ostream& out,
                               std::span<const TracePoint> points, Index k) {
  out << "iteration,k,precision\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f", p.precision);
    out << p.iteration << ',' << k << ',' << buf << '\n';
  }
}

}  // namespace aroma
