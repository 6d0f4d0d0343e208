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

#include "aroma/commands.hpp"

#include "aroma/arow.hpp"
#include "aroma/baselines.hpp"
#include "aroma/corpus.hpp"
#include "aroma/diagonal.hpp"
#include "aroma/eval.hpp"
#include "aroma/factored.hpp"
#include "aroma/sampler.hpp"
#include "aroma/theory.hpp"
#include "aroma/trace_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

namespace aroma {

namespace {

// Aggressiveness cap for the passive-aggressive baseline.
constexpr Real kPaAggressiveness = 0.1;

std::string fixed6(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write output file '" + path + "'");
  return out;
}

// x = vec(q p') as a sparse vector under column stacking.
SparseVector<Real> vectorized_pair(const SparseVector<Real>& q,
                                   const SparseVector<Real>& p) {
  std::vector<std::pair<Index, Real>> entries;
  entries.reserve(q.nnz() * p.nnz());
  const auto qi = q.indices();
  const auto qv = q.values();
  const auto pi = p.indices();
  const auto pv = p.values();
  for (std::size_t b = 0; b < pi.size(); ++b)
    for (std::size_t a = 0; a < qi.size(); ++a)
      entries.emplace_back(pi[b] * q.dim() + qi[a], qv[a] * pv[b]);
  return SparseVector<Real>::from_entries(q.dim() * p.dim(),
                                          std::move(entries));
}

MatrixX<Real> unstack_columns(const VectorX<Real>& v, Index rows, Index cols) {
  MatrixX<Real> out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = v(c * rows + r);
  return out;
}

void validate_train_options(const TrainOptions& options) {
  if (options.iterations < 0) throw DataError("iterations must be >= 0");
  const bool needs_r = options.algo == Algo::d_aroma ||
                       options.algo == Algo::f_aroma ||
                       options.algo == Algo::f_aroma_analysis ||
                       options.algo == Algo::arow_vec;
  if (needs_r && options.regularizer <= 0)
    throw DataError("the regularizer r must be positive");
  if (options.update_mode == UpdateMode::mistake &&
      (options.algo == Algo::f_aroma || options.algo == Algo::pa ||
       options.algo == Algo::identity))
    throw DataError(
        "--update-mode mistake applies to d-aroma and arow-vec; use "
        "f-aroma-analysis for the mistake-driven factored learner");
}

}  // namespace

void run_prep(const PrepOptions& options) {
  LabeledCorpus corpus = load_corpus(options.input);
  const Index original_dim = corpus.dim;
  if (options.tfidf) corpus = tfidf_transform(corpus);
  std::vector<Index> index_map(corpus.dim);
  for (Index i = 0; i < corpus.dim; ++i) index_map[i] = i;
  if (options.infogain) {
    auto selected = infogain_select(corpus, *options.infogain);
    corpus = std::move(selected.corpus);
    index_map = std::move(selected.kept);
  }
  save_corpus(corpus, options.output);
  auto map_out = open_output(options.output + ".map");
  map_out << "# new_index original_index (original dim " << original_dim
          << ")\n";
  for (Index i = 0; i < static_cast<Index>(index_map.size()); ++i)
    map_out << i << ' ' << index_map[i] << '\n';
}

StoredModel train_model(const TrainOptions& options,
                        const LabeledCorpus& corpus) {
  validate_train_options(options);
  const Index dim = corpus.dim;
  StoredModel stored;
  stored.variant = options.algo;
  stored.rows = dim;
  stored.cols = dim;
  stored.regularizer = options.regularizer;

  std::unique_ptr<TraceWriter> writer;
  const UpdateMode trace_mode = options.algo == Algo::f_aroma_analysis
                                    ? UpdateMode::mistake
                                    : options.update_mode;
  if (!options.trace_out.empty())
    writer = std::make_unique<TraceWriter>(options.trace_out, options.algo,
                                           trace_mode, dim, dim,
                                           options.regularizer);
  auto emit = [&](StepRecord<Real>&& rec, std::int64_t round) {
    if (!writer) return;
    rec.round = round;
    writer->write_record(rec);
  };

  // The identity baseline ignores the stream entirely.
  if (options.algo == Algo::identity) {
    stored.mean = identity_weights<Real>(dim, dim);
    if (writer) writer->finish(nullptr, nullptr, nullptr);
    return stored;
  }

  std::optional<TripletSampler> sampler;
  if (options.iterations > 0) sampler.emplace(corpus, options.seed);

  switch (options.algo) {
    case Algo::d_aroma: {
      auto model = DiagonalModel<Real>::initial(dim, dim, options.regularizer);
      for (std::int64_t i = 1; i <= options.iterations; ++i)
        emit(diag_step_inplace(model, sampler->next(), options.update_mode), i);
      stored.mean = std::move(model.mean);
      stored.confidence = std::move(model.confidence);
      if (writer) writer->finish(&*stored.confidence, nullptr, nullptr);
      break;
    }
    case Algo::arow_vec: {
      auto model = ArowModel<Real>::diagonal(dim * dim, options.regularizer);
      for (std::int64_t i = 1; i <= options.iterations; ++i) {
        const Triplet<Real> t = sampler->next();
        const SparseVector<Real> diff = t.difference();
        const SparseVector<Real> x = vectorized_pair(t.query, diff);
        StepRecord<Real> rec;
        rec.query = t.query;
        rec.object = diff;
        rec.margin = x.dot(model.weights);
        rec.hinge = std::max(Real(0), Real(1) - rec.margin);
        rec.mistake = rec.margin <= 0;
        const bool fire = options.update_mode == UpdateMode::margin
                              ? rec.margin < Real(1)
                              : rec.margin <= Real(0);
        if (fire) {
          const auto info = arow_update_inplace(model, x, +1);
          rec.updated = info.updated;
          rec.denominator = info.denominator;
          rec.margin_update = rec.updated && rec.margin > 0;
          rec.touched = x.nnz();
        }
        emit(std::move(rec), i);
      }
      stored.mean = unstack_columns(model.weights, dim, dim);
      stored.confidence = unstack_columns(*model.diag_cov, dim, dim);
      if (writer) writer->finish(&*stored.confidence, nullptr, nullptr);
      break;
    }
    case Algo::f_aroma:
    case Algo::f_aroma_analysis: {
      const auto mode = options.algo == Algo::f_aroma_analysis
                            ? FactoredMode::analysis
                            : FactoredMode::standard;
      auto model =
          FactoredModel<Real>::initial(dim, dim, options.regularizer, mode);
      for (std::int64_t i = 1; i <= options.iterations; ++i)
        emit(factored_step_inplace(model, sampler->next()), i);
      stored.mean = std::move(model.mean);
      stored.object_cov = std::move(model.object_cov);
      stored.query_cov = std::move(model.query_cov);
      if (writer)
        writer->finish(nullptr, &*stored.object_cov, &*stored.query_cov);
      break;
    }
    case Algo::pa: {
      auto model = PaModel<Real>::initial(dim, dim, kPaAggressiveness);
      for (std::int64_t i = 1; i <= options.iterations; ++i)
        emit(pa_step_inplace(model, sampler->next()), i);
      stored.mean = std::move(model.mean);
      if (writer) writer->finish(nullptr, nullptr, nullptr);
      break;
    }
    case Algo::identity:
      break;  // handled above
  }
  return stored;
}

void run_train(const TrainOptions& options) {
  validate_train_options(options);
  if (options.model_out.empty())
    throw DataError("train: --model-out is required");
  const LabeledCorpus corpus = load_corpus(options.train_path);
  const StoredModel model = train_model(options, corpus);
  save_model(model, options.model_out);
}

namespace {

void write_eval_report(std::ostream& out, const EvalReport& report) {
  out << "k,precision\n";
  for (std::size_t t = 0; t < report.k_values.size(); ++t)
    out << report.k_values[t] << ',' << fixed6(report.precision_at_k[t])
        << '\n';
  out << "mAP," << fixed6(report.mean_average_precision) << '\n';
}

}  // namespace

void run_eval(const EvalCmdOptions& options) {
  const StoredModel model = load_model(options.model_path);
  const LabeledCorpus corpus = load_corpus(options.eval_path);
  const auto report =
      evaluate_ranking(model.mean, corpus, std::span(options.k_values));
  if (report.queries_skipped > 0)
    std::cerr << "warning: " << report.queries_skipped
              << " queries had no same-label candidate and were skipped\n";
  if (options.out_path.empty()) {
    write_eval_report(std::cout, report);
  } else {
    auto out = open_output(options.out_path);
    write_eval_report(out, report);
  }
}

void run_sweep(const SweepOptions& options) {
  if (options.r_values.empty())
    throw DataError("sweep: at least one r value is required");
  const LabeledCorpus train = load_corpus(options.base.train_path);
  const LabeledCorpus eval_corpus = load_corpus(options.eval_path);

  std::ostringstream rows;
  rows << "r,k,precision,mAP\n";
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < options.r_values.size(); ++i) {
    TrainOptions per_run = options.base;
    per_run.regularizer = options.r_values[i];
    per_run.seed = options.base.seed + i;  // independent seeded runs
    per_run.trace_out.clear();
    try {
      const StoredModel model = train_model(per_run, train);
      const auto report = evaluate_ranking(model.mean, eval_corpus,
                                           std::span(options.k_values));
      if (options.k_values.empty()) {
        rows << options.r_values[i] << ",,,"
             << fixed6(report.mean_average_precision) << '\n';
      } else {
        for (std::size_t t = 0; t < report.k_values.size(); ++t)
          rows << options.r_values[i] << ',' << report.k_values[t] << ','
               << fixed6(report.precision_at_k[t]) << ','
               << fixed6(report.mean_average_precision) << '\n';
      }
    } catch (const Error& e) {
      failures.push_back("r=" + std::to_string(options.r_values[i]) + ": " +
                         e.what());
    }
  }
  if (options.out_path.empty()) {
    std::cout << rows.str();
  } else {
    auto out = open_output(options.out_path);
    out << rows.str();
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << failures.size() << " sweep run(s) failed:";
    for (const auto& f : failures) msg << "\n  " << f;
    throw DataError(msg.str());
  }
}

namespace {

MatrixX<Real> load_comparator(const std::string& path, Index rows,
                              Index cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open comparator file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("comparator file '" + path + "': " + e.what());
  }
  const nlohmann::json& arr = doc.is_object() && doc.contains("W") ? doc["W"] : doc;
  if (!arr.is_array() || static_cast<Index>(arr.size()) != rows)
    throw DataError("comparator file '" + path + "' is not a " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    " matrix");
  MatrixX<Real> out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(arr[r].size()) != cols)
      throw DataError("comparator file '" + path + "' has a ragged row");
    for (Index c = 0; c < cols; ++c) out(r, c) = arr[r][c].get<Real>();
  }
  return out;
}

}  // namespace

bool run_verify(const VerifyOptions& options) {
  if (options.random_comparators < 0)
    throw DataError("verify: the comparator count must be >= 0");
  const RunTrace<Real> trace = load_trace(options.trace_path);
  const bool diagonal_run =
      trace.algo == Algo::d_aroma || trace.algo == Algo::arow_vec;
  const bool analysis_run = trace.algo == Algo::f_aroma_analysis;
  if (!diagonal_run && !analysis_run)
    throw DataError("verify: no bound applies to a " + to_string(trace.algo) +
                    " trace (use d-aroma, arow-vec or f-aroma-analysis)");

  struct Comparator {
    std::string name;
    MatrixX<Real> value;
  };
  std::vector<Comparator> pool;
  pool.push_back({"zero", MatrixX<Real>::Zero(trace.rows, trace.cols)});
  if (!options.comparator_path.empty())
    pool.push_back({"file", load_comparator(options.comparator_path,
                                            trace.rows, trace.cols)});
  std::mt19937_64 gen(options.seed);
  for (int c = 0; c < options.random_comparators; ++c) {
    MatrixX<Real> v(trace.rows, trace.cols);
    for (Index i = 0; i < trace.rows; ++i)
      for (Index j = 0; j < trace.cols; ++j)
        v(i, j) = 2.0 * uniform_unit(gen) - 1.0;
    Real scale = 1.0;
    if (c % 3 == 1) scale = 0.1;
    if (c % 3 == 2) scale = 10.0;
    pool.push_back({"random-" + std::to_string(c) +
                        (scale != 1.0 ? (scale < 1.0 ? "(x0.1)" : "(x10)") : ""),
                    scale * v});
  }

  const double mistakes = static_cast<double>(trace.mistakes());
  const std::int64_t margin_updates = trace.margin_updates();
  std::ostringstream out;
  bool all_pass = true;
  for (const auto& cmp : pool) {
    const Real bound = diagonal_run ? thm1_bound(cmp.value, trace)
                                    : thm2_bound(cmp.value, trace);
    const bool pass =
        mistakes <= bound + 1e-8 * std::max(1.0, std::abs(bound));
    all_pass = all_pass && pass;
    nlohmann::json record;
    record["run_id"] = options.trace_path;
    record["comparator"] = cmp.name;
    record["bound"] = diagonal_run ? "thm1" : "thm2";
    record["mistakes"] = trace.mistakes();
    record["margin_updates"] = margin_updates;
    record["value"] = bound;
    record["pass"] = pass;
    out << record.dump() << "\n";
  }
  if (analysis_run) {
    const auto lemma = lemma3_check(trace);
    all_pass = all_pass && lemma.ok;
    nlohmann::json record;
    record["run_id"] = options.trace_path;
    record["bound"] = "lemma3";
    record["lhs"] = lemma.lhs;
    record["rhs_object"] = lemma.rhs_object;
    record["rhs_query"] = lemma.rhs_query;
    record["pass"] = lemma.ok;
    out << record.dump() << "\n";
  }
  out << "|M| " << trace.mistakes() << " |U| " << margin_updates << " "
      << (all_pass ? "PASS" : "FAIL") << "\n";
  if (options.out_path.empty()) {
    std::cout << out.str();
  } else {
    auto file = open_output(options.out_path);
    file << out.str();
  }
  return all_pass;
}

}  // namespace aroma
