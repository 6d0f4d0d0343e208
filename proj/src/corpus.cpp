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

#include "aroma/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace aroma {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_value(const std::string& tok, std::size_t line_no) {
  double v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail_line(line_no, "bad numeric value '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok, std::size_t line_no) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail_line(line_no, "bad integer '" + tok + "'");
  return v;
}

std::string format_value(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

LabeledCorpus parse_corpus(std::istream& in) {
  LabeledCorpus corpus;
  std::unordered_set<std::string> seen_ids;
  bool have_dim = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (!have_dim) {
      if (toks.size() != 2 || toks[0] != "dim")
        fail_line(line_no, "expected 'dim <d>' header");
      const long long d = parse_int(toks[1], line_no);
      if (d < 0) fail_line(line_no, "dimension must be >= 0");
      corpus.dim = static_cast<Index>(d);
      have_dim = true;
      continue;
    }
    if (toks.size() < 2) fail_line(line_no, "expected '<id> <label> ...'");
    Example ex;
    ex.id = toks[0];
    ex.label = toks[1];
    if (!seen_ids.insert(ex.id).second)
      fail_line(line_no, "duplicate example id '" + ex.id + "'");
    std::vector<std::pair<Index, Real>> entries;
    Index prev = -1;
    for (std::size_t t = 2; t < toks.size(); ++t) {
      const auto colon = toks[t].find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == toks[t].size())
        fail_line(line_no, "expected '<index>:<value>', got '" + toks[t] + "'");
      const long long idx = parse_int(toks[t].substr(0, colon), line_no);
      const double val = parse_value(toks[t].substr(colon + 1), line_no);
      if (idx < 0 || idx >= corpus.dim)
        fail_line(line_no, "feature index " + std::to_string(idx) +
                               " out of range for dim " +
                               std::to_string(corpus.dim));
      if (idx <= prev) fail_line(line_no, "feature indices must strictly increase");
      if (!std::isfinite(val)) fail_line(line_no, "non-finite feature value");
      prev = static_cast<Index>(idx);
      entries.emplace_back(static_cast<Index>(idx), val);
    }
    ex.features = SparseVector<Real>::from_entries(corpus.dim, std::move(entries));
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

LabeledCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  try {
    return parse_corpus(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_corpus(const LabeledCorpus& corpus, std::ostream& out) {
  out << "dim " << corpus.dim << "\n";
  for (const auto& ex : corpus.examples) {
    out << ex.id << ' ' << ex.label;
    const auto idx = ex.features.indices();
    const auto val = ex.features.values();
    for (std::size_t t = 0; t < idx.size(); ++t)
      out << ' ' << idx[t] << ':' << format_value(val[t]);
    out << '\n';
  }
}

void save_corpus(const LabeledCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file '" + path + "'");
  write_corpus(corpus, out);
}

LabeledCorpus tfidf_transform(const LabeledCorpus& corpus) {
  const Index n_docs = corpus.size();
  std::vector<Index> df(corpus.dim, 0);
  for (const auto& ex : corpus.examples)
    for (const Index i : ex.features.indices()) ++df[i];

  LabeledCorpus out;
  out.dim = corpus.dim;
  out.examples.reserve(corpus.examples.size());
  for (const auto& ex : corpus.examples) {
    std::vector<std::pair<Index, Real>> entries;
    const auto idx = ex.features.indices();
    const auto val = ex.features.values();
    double norm_sq = 0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      if (df[idx[t]] == n_docs) continue;  // ln(N/N) = 0
      const double w =
          val[t] * std::log(static_cast<double>(n_docs) / df[idx[t]]);
      entries.emplace_back(idx[t], w);
      norm_sq += w * w;
    }
    if (norm_sq > 0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [i, w] : entries) w *= inv;
    }
    out.examples.push_back(
        {ex.id, ex.label,
         SparseVector<Real>::from_entries(corpus.dim, std::move(entries))});
  }
  return out;
}

namespace {

double entropy(const std::vector<Index>& counts, Index total) {
  if (total == 0) return 0;
  double h = 0;
  for (const Index c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

SelectionResult infogain_select(const LabeledCorpus& corpus, Index k) {
  if (k <= 0) throw DataError("infogain selection requires k > 0");
  if (k > corpus.dim)
    throw DataError("infogain selection: k = " + std::to_string(k) +
                    " exceeds feature dimension " + std::to_string(corpus.dim));

  std::map<std::string, Index> label_ids;
  for (const auto& ex : corpus.examples) label_ids.emplace(ex.label, 0);
  Index next = 0;
  for (auto& [label, id] : label_ids) id = next++;
  const Index n_labels = next;
  const Index n_docs = corpus.size();

  std::vector<Index> class_counts(n_labels, 0);
  std::vector<std::vector<Index>> present(corpus.dim,
                                          std::vector<Index>(n_labels, 0));
  for (const auto& ex : corpus.examples) {
    const Index c = label_ids.at(ex.label);
    ++class_counts[c];
    for (const Index i : ex.features.indices()) ++present[i][c];
  }

  const double class_entropy = entropy(class_counts, n_docs);
  std::vector<Real> gain(corpus.dim, 0);
  std::vector<Index> absent(n_labels, 0);
  for (Index f = 0; f < corpus.dim; ++f) {
    Index df = 0;
    for (Index c = 0; c < n_labels; ++c) {
      df += present[f][c];
      absent[c] = class_counts[c] - present[f][c];
    }
    if (n_docs == 0) continue;
    const double p_t = static_cast<double>(df) / n_docs;
    const double cond = p_t * entropy(present[f], df) +
                        (1.0 - p_t) * entropy(absent, n_docs - df);
    gain[f] = class_entropy - cond;
  }

  std::vector<Index> order(corpus.dim);
  for (Index f = 0; f < corpus.dim; ++f) order[f] = f;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (gain[a] != gain[b]) return gain[a] > gain[b];
    return a < b;
  });
  std::vector<Index> kept(order.begin(), order.begin() + k);
  std::sort(kept.begin(), kept.end());

  std::unordered_map<Index, Index> remap;
  for (Index t = 0; t < k; ++t) remap.emplace(kept[t], t);

  SelectionResult result;
  result.kept = std::move(kept);
  result.gain = std::move(gain);
  result.corpus.dim = k;
  result.corpus.examples.reserve(corpus.examples.size());
  for (const auto& ex : corpus.examples) {
    std::vector<std::pair<Index, Real>> entries;
    const auto idx = ex.features.indices();
    const auto val = ex.features.values();
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const auto it = remap.find(idx[t]);
      if (it != remap.end()) entries.emplace_back(it->second, val[t]);
    }
    result.corpus.examples.push_back(
        {ex.id, ex.label, SparseVector<Real>::from_entries(k, std::move(entries))});
  }
  return result;
}

}  // namespace aroma
