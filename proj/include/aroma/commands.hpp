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

// Command implementations behind the CLI. Each function does the work of one
// subcommand and throws DataError / DimensionError / NumericalError on
// failure; the CLI front end maps those to exit codes.

#pragma once

#include "aroma/corpus.hpp"
#include "aroma/model_io.hpp"
#include "aroma/trace.hpp"
#include "aroma/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aroma {

struct PrepOptions {
  std::string input;
  std::string output;
  bool tfidf = false;
  std::optional<Index> infogain;  // top-k feature selection when set
};

/// Transforms a corpus file and writes it plus a "<output>.map" sidecar
/// mapping new feature indices to original ones.
void run_prep(const PrepOptions& options);

struct TrainOptions {
  Algo algo = Algo::d_aroma;
  Real regularizer = 1.0;
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  UpdateMode update_mode = UpdateMode::margin;  // d-aroma / arow-vec only
  std::string train_path;
  std::string model_out;
  std::string trace_out;  // empty: no trace emission
};

/// Runs the selected learner over seeded triplets and writes the model file
/// (and optionally the run trace). Iteration count zero writes the initial
/// model.
void run_train(const TrainOptions& options);

/// In-memory variant used by the sweep and the tests; returns the stored
/// model instead of touching the filesystem (trace_out is still honored).
StoredModel train_model(const TrainOptions& options,
                        const LabeledCorpus& corpus);

struct EvalCmdOptions {
  std::string model_path;
  std::string eval_path;
  std::vector<Index> k_values;
  std::string out_path;  // empty: stdout
};

/// Ranks the evaluation corpus with a stored model and emits the
/// "k,precision" rows with the "mAP,<value>" footer.
void run_eval(const EvalCmdOptions& options);

struct SweepOptions {
  TrainOptions base;           // template; r and seed are overridden per run
  std::vector<Real> r_values;
  std::string eval_path;
  std::vector<Index> k_values;
  std::string out_path;  // empty: stdout
};

/// Independent seeded runs per regularizer value; one "r,k,precision,mAP"
/// row per (r, k). Failing runs are reported and skipped.
void run_sweep(const SweepOptions& options);

struct VerifyOptions {
  std::string trace_path;
  int random_comparators = 20;
  std::uint64_t seed = 7;
  std::string comparator_path;  // optional model/matrix file with a known V
  std::string out_path;         // empty: stdout
};

/// Evaluates the applicable mistake bound (and the telescoping inequality
/// for mistake-driven factored traces) against a comparator pool. Returns
/// true when every check passes.
bool run_verify(const VerifyOptions& options);

}  // namespace aroma
