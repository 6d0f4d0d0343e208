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

#include "aroma/model_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace aroma {

using nlohmann::json;

namespace {

json matrix_to_json(const MatrixX<Real>& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixX<Real> matrix_from_json(const json& j, Index rows, Index cols,
                               const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw DataError("model field '" + name + "' is not a " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    " array");
  MatrixX<Real> out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw DataError("model field '" + name + "' has a malformed row");
    for (Index c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw DataError("model field '" + name + "' holds a non-number");
      const Real v = row[c].get<Real>();
      if (!std::isfinite(v))
        throw DataError("model field '" + name + "' holds a non-finite value");
      out(r, c) = v;
    }
  }
  return out;
}

}  // namespace

void save_model(const StoredModel& model, const std::string& path) {
  json doc;
  doc["variant"] = to_string(model.variant);
  doc["m"] = model.rows;
  doc["n"] = model.cols;
  doc["r"] = model.regularizer;
  doc["W"] = matrix_to_json(model.mean);
  if (model.confidence) doc["Sigma"] = matrix_to_json(*model.confidence);
  if (model.object_cov) doc["Omega"] = matrix_to_json(*model.object_cov);
  if (model.query_cov) doc["Lambda"] = matrix_to_json(*model.query_cov);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << doc.dump() << "\n";
}

StoredModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path + "': " + e.what());
  }
  try {
    StoredModel model;
    model.variant = algo_from_string(doc.at("variant").get<std::string>());
    model.rows = doc.at("m").get<Index>();
    model.cols = doc.at("n").get<Index>();
    model.regularizer = doc.at("r").get<Real>();
    if (model.rows < 0 || model.cols < 0)
      throw DataError("negative model dimensions");
    model.mean = matrix_from_json(doc.at("W"), model.rows, model.cols, "W");
    if (doc.contains("Sigma"))
      model.confidence =
          matrix_from_json(doc["Sigma"], model.rows, model.cols, "Sigma");
    if (doc.contains("Omega"))
      model.object_cov =
          matrix_from_json(doc["Omega"], model.cols, model.cols, "Omega");
    if (doc.contains("Lambda"))
      model.query_cov =
          matrix_from_json(doc["Lambda"], model.rows, model.rows, "Lambda");
    return model;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path + "': " + e.what());
  }
}

}  // namespace aroma
