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

#include <fstream>
#include <memory>
#include <string>

namespace aroma {

/// Streams a run trace to disk as line-delimited JSON records (one header,
/// one record per round, one final snapshot), so long runs never buffer the
/// whole trace in memory.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, Algo algo, UpdateMode mode, Index rows,
              Index cols, Real regularizer);
  ~TraceWriter();
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  void write_record(const StepRecord<Real>& rec);
  /// Final confidence snapshot; pass what the variant maintains.
  void finish(const MatrixX<Real>* confidence, const MatrixX<Real>* object_cov,
              const MatrixX<Real>* query_cov);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads a trace file back; validates the record structure.
RunTrace<Real> load_trace(const std::string& path);

/// Writes an in-memory trace in the same format.
void save_trace(const RunTrace<Real>& trace, const std::string& path);

}  // namespace aroma
