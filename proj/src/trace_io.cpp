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

#include "aroma/trace_io.hpp"

#include <json.hpp>

#include <fstream>
#include <utility>
#include <vector>

namespace aroma {

using nlohmann::json;

namespace {

json sparse_to_json(const SparseVector<Real>& v) {
  json out;
  out["dim"] = v.dim();
  out["idx"] = std::vector<Index>(v.indices().begin(), v.indices().end());
  out["val"] = std::vector<Real>(v.values().begin(), v.values().end());
  return out;
}

SparseVector<Real> sparse_from_json(const json& j) {
  const Index dim = j.at("dim").get<Index>();
  const auto idx = j.at("idx").get<std::vector<Index>>();
  const auto val = j.at("val").get<std::vector<Real>>();
  if (idx.size() != val.size())
    throw DataError("trace record: index/value length mismatch");
  std::vector<std::pair<Index, Real>> entries;
  entries.reserve(idx.size());
  for (std::size_t t = 0; t < idx.size(); ++t)
    entries.emplace_back(idx[t], val[t]);
  return SparseVector<Real>::from_entries(dim, std::move(entries));
}

json matrix_to_json(const MatrixX<Real>& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixX<Real> matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
  MatrixX<Real> out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[r].size()) != cols)
      throw DataError("trace final snapshot: ragged matrix");
    for (Index c = 0; c < cols; ++c) out(r, c) = j[r][c].get<Real>();
  }
  return out;
}

}  // namespace

struct TraceWriter::Impl {
  std::ofstream out;
  bool finished = false;
};

TraceWriter::TraceWriter(const std::string& path, Algo algo, UpdateMode mode,
                         Index rows, Index cols, Real regularizer)
    : impl_(std::make_unique<Impl>()) {
  impl_->out.open(path);
  if (!impl_->out) throw DataError("cannot write trace file '" + path + "'");
  json header;
  header["type"] = "header";
  header["algo"] = to_string(algo);
  header["mode"] = to_string(mode);
  header["m"] = rows;
  header["n"] = cols;
  header["r"] = regularizer;
  impl_->out << header.dump() << "\n";
}

TraceWriter::~TraceWriter() {
  if (impl_ && !impl_->finished) impl_->out.flush();
}

void TraceWriter::write_record(const StepRecord<Real>& rec) {
  json j;
  j["type"] = "round";
  j["i"] = rec.round;
  j["q"] = sparse_to_json(rec.query);
  j["p"] = sparse_to_json(rec.object);
  j["margin"] = rec.margin;
  j["hinge"] = rec.hinge;
  j["updated"] = rec.updated;
  j["in_m"] = rec.mistake;
  j["in_u"] = rec.margin_update;
  j["denom"] = rec.denominator;
  j["pre_qlq"] = rec.pre_query_form;
  j["pre_pop"] = rec.pre_object_form;
  j["post_qlq"] = rec.post_query_form;
  j["post_pop"] = rec.post_object_form;
  impl_->out << j.dump() << "\n";
}

void TraceWriter::finish(const MatrixX<Real>* confidence,
                         const MatrixX<Real>* object_cov,
                         const MatrixX<Real>* query_cov) {
  json j;
  j["type"] = "final";
  if (confidence) j["Sigma"] = matrix_to_json(*confidence);
  if (object_cov) j["Omega"] = matrix_to_json(*object_cov);
  if (query_cov) j["Lambda"] = matrix_to_json(*query_cov);
  impl_->out << j.dump() << "\n";
  impl_->out.flush();
  impl_->finished = true;
}

RunTrace<Real> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file '" + path + "'");
  RunTrace<Real> trace;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        trace.algo = algo_from_string(j.at("algo").get<std::string>());
        trace.mode = update_mode_from_string(j.at("mode").get<std::string>());
        trace.rows = j.at("m").get<Index>();
        trace.cols = j.at("n").get<Index>();
        trace.regularizer = j.at("r").get<Real>();
        have_header = true;
      } else if (type == "round") {
        StepRecord<Real> rec;
        rec.round = j.at("i").get<std::int64_t>();
        rec.query = sparse_from_json(j.at("q"));
        rec.object = sparse_from_json(j.at("p"));
        rec.margin = j.at("margin").get<Real>();
        rec.hinge = j.at("hinge").get<Real>();
        rec.updated = j.at("updated").get<bool>();
        rec.mistake = j.at("in_m").get<bool>();
        rec.margin_update = j.at("in_u").get<bool>();
        rec.denominator = j.at("denom").get<Real>();
        rec.pre_query_form = j.at("pre_qlq").get<Real>();
        rec.pre_object_form = j.at("pre_pop").get<Real>();
        rec.post_query_form = j.at("post_qlq").get<Real>();
        rec.post_object_form = j.at("post_pop").get<Real>();
        trace.records.push_back(std::move(rec));
      } else if (type == "final") {
        if (j.contains("Sigma"))
          trace.final_confidence = matrix_from_json(j["Sigma"]);
        if (j.contains("Omega"))
          trace.final_object_cov = matrix_from_json(j["Omega"]);
        if (j.contains("Lambda"))
          trace.final_query_cov = matrix_from_json(j["Lambda"]);
      } else {
        throw DataError("unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw DataError("trace file '" + path + "' line " +
                    std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header)
    throw DataError("trace file '" + path + "' lacks a header record");
  return trace;
}

void save_trace(const RunTrace<Real>& trace, const std::string& path) {
  TraceWriter writer(path, trace.algo, trace.mode, trace.rows, trace.cols,
                     trace.regularizer);
  for (const auto& rec : trace.records) writer.write_record(rec);
  writer.finish(trace.final_confidence ? &*trace.final_confidence : nullptr,
                trace.final_object_cov ? &*trace.final_object_cov : nullptr,
                trace.final_query_cov ? &*trace.final_query_cov : nullptr);
}

}  // namespace aroma
