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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aroma/commands.hpp"
#include "aroma/corpus.hpp"
#include "aroma/diagonal.hpp"
#include "aroma/eval.hpp"
#include "aroma/factored.hpp"
#include "aroma/sampler.hpp"
#include "aroma/trace_io.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aroma;
using namespace aroma::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("aroma_cli_test_" + std::to_string(std::rand()) +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count() % 100000));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

const char* kToyCorpus =
    "dim 4\n"
    "a x 0:2 2:1\n"
    "b x 0:1 3:1\n"
    "c y 1:1 2:2\n"
    "d y 1:2 3:1\n"
    "e x 0:2 1:1\n"
    "f y 1:1 3:2\n";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AROMA_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("prep: identity selection with tf-idf, byte-identical replays") {
  TempDir dir;
  write_file(dir.file("in.corpus"), kToyCorpus);

  PrepOptions opts;
  opts.input = dir.file("in.corpus");
  opts.output = dir.file("out1.corpus");
  opts.tfidf = true;
  opts.infogain = 4;  // k = d: identity selection
  run_prep(opts);
  opts.output = dir.file("out2.corpus");
  run_prep(opts);
  CHECK(slurp(dir.file("out1.corpus")) == slurp(dir.file("out2.corpus")));
  CHECK(slurp(dir.file("out1.corpus.map")) == slurp(dir.file("out2.corpus.map")));

  // values match the in-process transform
  const auto expected = tfidf_transform(load_corpus(dir.file("in.corpus")));
  const auto written = load_corpus(dir.file("out1.corpus"));
  REQUIRE(written.size() == expected.size());
  for (Index i = 0; i < written.size(); ++i)
    CHECK(written.examples[i].features == expected.examples[i].features);
}

TEST_CASE("prep: infogain selection matches the library and writes the map") {
  TempDir dir;
  std::mt19937_64 g(233);
  LabeledCorpus corpus;
  corpus.dim = 10;
  for (int i = 0; i < 20; ++i)
    corpus.examples.push_back({"d" + std::to_string(i),
                               "c" + std::to_string(below_draw(g, 2)),
                               random_sparse(g, 10)});
  save_corpus(corpus, dir.file("in.corpus"));

  PrepOptions opts;
  opts.input = dir.file("in.corpus");
  opts.output = dir.file("out.corpus");
  opts.infogain = 5;
  run_prep(opts);

  const auto oracle = infogain_select(corpus, 5);
  const auto written = load_corpus(dir.file("out.corpus"));
  CHECK(written.dim == 5);
  for (Index i = 0; i < written.size(); ++i)
    CHECK(written.examples[i].features == oracle.corpus.examples[i].features);

  std::istringstream map(slurp(dir.file("out.corpus.map")));
  std::string header;
  std::getline(map, header);
  Index new_idx, old_idx;
  std::size_t rows = 0;
  while (map >> new_idx >> old_idx) {
    CHECK(oracle.kept.at(new_idx) == old_idx);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("train: zero iterations writes the initial model") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);

  TrainOptions opts;
  opts.train_path = dir.file("c.corpus");
  opts.model_out = dir.file("d.model");
  opts.algo = Algo::d_aroma;
  opts.regularizer = 0.5;
  run_train(opts);
  const auto d = load_model(dir.file("d.model"));
  CHECK(d.mean.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(d.confidence.has_value());
  CHECK(*d.confidence == MatrixX<Real>::Constant(4, 4, 1.0));

  opts.algo = Algo::f_aroma;
  opts.model_out = dir.file("f.model");
  run_train(opts);
  const auto f = load_model(dir.file("f.model"));
  CHECK(f.mean.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(f.object_cov.has_value());
  CHECK(*f.object_cov == MatrixX<Real>::Identity(4, 4));
  CHECK(*f.query_cov == MatrixX<Real>::Identity(4, 4));
}

TEST_CASE("train: the identity algorithm ignores the data") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  TrainOptions opts;
  opts.train_path = dir.file("c.corpus");
  opts.model_out = dir.file("i.model");
  opts.algo = Algo::identity;
  opts.iterations = 1000;
  opts.seed = 9;
  run_train(opts);
  const auto m = load_model(dir.file("i.model"));
  CHECK(m.mean == MatrixX<Real>::Identity(4, 4));
}

TEST_CASE("train: fixed seeds reproduce model and trace files byte for byte") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  for (const Algo algo : {Algo::d_aroma, Algo::f_aroma, Algo::f_aroma_analysis,
                          Algo::arow_vec, Algo::pa}) {
    TrainOptions opts;
    opts.train_path = dir.file("c.corpus");
    opts.algo = algo;
    opts.regularizer = 0.3;
    opts.iterations = 60;
    opts.seed = 1234;
    opts.model_out = dir.file("m1.model");
    opts.trace_out = dir.file("t1.trace");
    run_train(opts);
    opts.model_out = dir.file("m2.model");
    opts.trace_out = dir.file("t2.trace");
    run_train(opts);
    CHECK(slurp(dir.file("m1.model")) == slurp(dir.file("m2.model")));
    CHECK(slurp(dir.file("t1.trace")) == slurp(dir.file("t2.trace")));
  }
}

TEST_CASE("train: arow-vec and d-aroma agree on the same stream") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  TrainOptions opts;
  opts.train_path = dir.file("c.corpus");
  opts.regularizer = 0.4;
  opts.iterations = 80;
  opts.seed = 77;
  opts.algo = Algo::d_aroma;
  opts.model_out = dir.file("d.model");
  run_train(opts);
  opts.algo = Algo::arow_vec;
  opts.model_out = dir.file("a.model");
  run_train(opts);
  const auto d = load_model(dir.file("d.model"));
  const auto a = load_model(dir.file("a.model"));
  CHECK((d.mean - a.mean).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((*d.confidence - *a.confidence).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("train: saved traces load back intact") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  TrainOptions opts;
  opts.train_path = dir.file("c.corpus");
  opts.algo = Algo::f_aroma_analysis;
  opts.regularizer = 1.0;
  opts.iterations = 40;
  opts.seed = 5;
  opts.model_out = dir.file("m.model");
  opts.trace_out = dir.file("t.trace");
  run_train(opts);
  const auto trace = load_trace(dir.file("t.trace"));
  CHECK(trace.algo == Algo::f_aroma_analysis);
  CHECK(trace.mode == UpdateMode::mistake);
  CHECK(trace.records.size() == 40);
  REQUIRE(trace.final_object_cov.has_value());
  const auto model = load_model(dir.file("m.model"));
  CHECK(*trace.final_object_cov == *model.object_cov);
  for (const auto& rec : trace.records) CHECK(rec.updated == rec.mistake);
}

TEST_CASE("eval: identity model, duplicate-aware corpus, report format") {
  TempDir dir;
  // orthonormal docs; each class has an exact duplicate pair
  write_file(dir.file("e.corpus"),
             "dim 4\n"
             "a x 0:1\n"
             "a2 x 0:1\n"
             "b y 1:1\n"
             "b2 y 1:1\n");
  write_file(dir.file("i.corpus"), kToyCorpus);
  TrainOptions topts;
  topts.train_path = dir.file("e.corpus");
  topts.algo = Algo::identity;
  topts.model_out = dir.file("i.model");
  run_train(topts);

  EvalCmdOptions opts;
  opts.model_path = dir.file("i.model");
  opts.eval_path = dir.file("e.corpus");
  opts.k_values = {1};
  opts.out_path = dir.file("report.csv");
  run_eval(opts);
  const std::string report = slurp(dir.file("report.csv"));
  CHECK(report == "k,precision\n1,1.000000\nmAP,1.000000\n");

  // empty k list: mAP-only report
  opts.k_values = {};
  opts.out_path = dir.file("map_only.csv");
  run_eval(opts);
  CHECK(slurp(dir.file("map_only.csv")) == "k,precision\nmAP,1.000000\n");
}

TEST_CASE("eval report matches the in-process evaluation") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  TrainOptions topts;
  topts.train_path = dir.file("c.corpus");
  topts.algo = Algo::d_aroma;
  topts.regularizer = 0.5;
  topts.iterations = 100;
  topts.seed = 3;
  topts.model_out = dir.file("m.model");
  run_train(topts);

  EvalCmdOptions opts;
  opts.model_path = dir.file("m.model");
  opts.eval_path = dir.file("c.corpus");
  opts.k_values = {1, 3};
  opts.out_path = dir.file("report.csv");
  run_eval(opts);

  const auto model = load_model(dir.file("m.model"));
  const auto corpus = load_corpus(dir.file("c.corpus"));
  const std::vector<Index> ks{1, 3};
  const auto report = evaluate_ranking(model.mean, corpus, std::span(ks));
  char expected[256];
  std::snprintf(expected, sizeof expected,
                "k,precision\n1,%.6f\n3,%.6f\nmAP,%.6f\n",
                report.precision_at_k[0], report.precision_at_k[1],
                report.mean_average_precision);
  CHECK(slurp(dir.file("report.csv")) == expected);
}

TEST_CASE("sweep: composition, row counts, ranges, duplicate replay") {
  TempDir dir;
  write_file(dir.file("c.corpus"), kToyCorpus);
  SweepOptions opts;
  opts.base.train_path = dir.file("c.corpus");
  opts.base.algo = Algo::d_aroma;
  opts.base.iterations = 60;
  opts.base.seed = 21;
  opts.eval_path = dir.file("c.corpus");
  opts.k_values = {1, 2};
  opts.r_values = {0.5};
  opts.out_path = dir.file("single.csv");
  run_sweep(opts);

  // single r equals the train+eval composition
  TrainOptions topts = opts.base;
  topts.regularizer = 0.5;
  topts.model_out = dir.file("m.model");
  run_train(topts);
  EvalCmdOptions eopts;
  eopts.model_path = dir.file("m.model");
  eopts.eval_path = dir.file("c.corpus");
  eopts.k_values = {1, 2};
  eopts.out_path = dir.file("direct.csv");
  run_eval(eopts);
  std::istringstream sweep_csv(slurp(dir.file("single.csv")));
  std::istringstream direct_csv(slurp(dir.file("direct.csv")));
  std::string sweep_line, direct_line;
  std::getline(sweep_csv, sweep_line);  // headers differ; skip both
  std::getline(direct_csv, direct_line);
  std::getline(sweep_csv, sweep_line);
  std::getline(direct_csv, direct_line);
  CHECK(sweep_line.substr(sweep_line.find(',') + 1, direct_line.size()) ==
        direct_line);

  // four r values, duplicates replay identically
  opts.r_values = {0.01, 0.1, 0.1, 10.0};
  opts.out_path = dir.file("multi.csv");
  run_sweep(opts);
  std::istringstream multi(slurp(dir.file("multi.csv")));
  std::string line;
  std::getline(multi, line);
  CHECK(line == "r,k,precision,mAP");
  std::vector<std::string> rows;
  while (std::getline(multi, line)) rows.push_back(line);
  REQUIRE(rows.size() == 8);  // 4 r values x 2 k values
  CHECK(rows[2] == rows[4]);  // duplicated r rows match
  CHECK(rows[3] == rows[5]);
  for (const auto& row : rows) {
    std::istringstream fields(row);
    std::string r_str, k_str, p_str;
    std::getline(fields, r_str, ',');
    std::getline(fields, k_str, ',');
    std::getline(fields, p_str, ',');
    const double p = std::stod(p_str);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("verify: empty, scalar and generated traces") {
  TempDir dir;

  // empty trace: all zeros, passes
  {
    const auto model =
        FactoredModel<Real>::initial(2, 2, 1.0, FactoredMode::analysis);
    const auto [out, trace] =
        factored_train(model, std::span<const Triplet<Real>>{});
    save_trace(trace, dir.file("empty.trace"));
    VerifyOptions vopts;
    vopts.trace_path = dir.file("empty.trace");
    vopts.random_comparators = 3;
    vopts.out_path = dir.file("empty.report");
    CHECK(run_verify(vopts));
    CHECK(slurp(dir.file("empty.report")).find("|M| 0 |U| 0 PASS") !=
          std::string::npos);
  }

  // the scalar single-update run: lemma-3 triple (0.25, ln 2, ln 2, pass)
  {
    const auto model =
        FactoredModel<Real>::initial(1, 1, 1.0, FactoredMode::analysis);
    const std::vector<Triplet<Real>> one{
        {SparseVector<Real>::from_entries(1, {{0, 1.0}}),
         SparseVector<Real>::from_entries(1, {{0, 1.0}}),
         SparseVector<Real>(1)}};
    const auto [out, trace] = factored_train(model, std::span(one));
    save_trace(trace, dir.file("scalar.trace"));
    VerifyOptions vopts;
    vopts.trace_path = dir.file("scalar.trace");
    vopts.random_comparators = 2;
    vopts.out_path = dir.file("scalar.report");
    CHECK(run_verify(vopts));
    const std::string report = slurp(dir.file("scalar.report"));
    CHECK(report.find("\"lhs\":0.25") != std::string::npos);
    CHECK(report.find("\"rhs_object\":0.693147") != std::string::npos);
    CHECK(report.find("|M| 1 |U| 0 PASS") != std::string::npos);
  }

  // generated runs through the full train -> verify pipeline
  {
    write_file(dir.file("c.corpus"), kToyCorpus);
    for (const Algo algo : {Algo::d_aroma, Algo::arow_vec, Algo::f_aroma_analysis}) {
      TrainOptions topts;
      topts.train_path = dir.file("c.corpus");
      topts.algo = algo;
      topts.regularizer = 0.5;
      topts.iterations = 80;
      topts.seed = 17;
      topts.model_out = dir.file("m.model");
      topts.trace_out = dir.file("t.trace");
      run_train(topts);
      VerifyOptions vopts;
      vopts.trace_path = dir.file("t.trace");
      vopts.random_comparators = 10;
      vopts.out_path = dir.file("t.report");
      CHECK(run_verify(vopts));
    }
  }

  // traces with no applicable bound are rejected
  {
    write_file(dir.file("c.corpus"), kToyCorpus);
    TrainOptions topts;
    topts.train_path = dir.file("c.corpus");
    topts.algo = Algo::pa;
    topts.iterations = 10;
    topts.model_out = dir.file("m.model");
    topts.trace_out = dir.file("pa.trace");
    run_train(topts);
    VerifyOptions vopts;
    vopts.trace_path = dir.file("pa.trace");
    CHECK_THROWS_AS(run_verify(vopts), DataError);
  }
}

TEST_CASE("train rejects invalid configurations before any work") {
  TrainOptions opts;
  opts.train_path = "/nonexistent";
  opts.model_out = "/tmp/never_written.model";
  opts.algo = Algo::d_aroma;
  opts.regularizer = -1.0;
  CHECK_THROWS_AS(run_train(opts), DataError);  // bad r, checked first
  opts.regularizer = 1.0;
  opts.iterations = -3;
  CHECK_THROWS_AS(run_train(opts), DataError);
  opts.iterations = 0;
  opts.algo = Algo::f_aroma;
  opts.update_mode = UpdateMode::mistake;
  CHECK_THROWS_AS(run_train(opts), DataError);  // mistake mode needs analysis
}

TEST_CASE("cli binary: exit codes per failure class") {
  TempDir dir;
  CHECK(run_cli("--help > /dev/null 2>&1") == 0);
  CHECK(run_cli("train --bogus-flag 2> /dev/null") == 1);       // usage
  CHECK(run_cli("nonsense-subcommand 2> /dev/null") == 1);      // usage
  CHECK(run_cli("train --train /nonexistent.corpus --model-out " +
                dir.file("m.model") + " 2> /dev/null") == 2);   // data error

  write_file(dir.file("c.corpus"), kToyCorpus);
  const std::string train_cmd =
      "train --algo f-aroma-analysis --r 1 --iters 50 --seed 4 --train " +
      dir.file("c.corpus") + " --model-out " + dir.file("m.model") +
      " --trace-out " + dir.file("t.trace");
  CHECK(run_cli(train_cmd + " > /dev/null 2>&1") == 0);
  CHECK(run_cli("verify " + dir.file("t.trace") + " > /dev/null 2>&1") == 0);
  CHECK(run_cli("eval " + dir.file("m.model") + " --eval " +
                dir.file("c.corpus") + " --k 1 > /dev/null 2>&1") == 0);
  // mismatched model/corpus dimensions are a data error
  write_file(dir.file("bigger.corpus"), "dim 9\na x 0:1\nb x 1:1\nc y 2:1\n");
  CHECK(run_cli("eval " + dir.file("m.model") + " --eval " +
                dir.file("bigger.corpus") + " --k 1 2> /dev/null") == 2);
}

TEST_CASE("per-step cost scales with the model area") {
  // doubling both dimensions should cost about 4x per step, not O(1) and
  // not quadratically more; generous bounds keep this a sanity check only
  auto time_per_step = [](Index dim) {
    std::mt19937_64 g(414);
    SyntheticConfig cfg;
    cfg.dim = dim;
    cfg.classes = 4;
    cfg.docs_per_class = 6;
    cfg.seed = 31;
    const auto corpus = synthetic_corpus(cfg);
    TripletSampler sampler(corpus, 8);
    auto model = DiagonalModel<Real>::initial(dim, dim, 1.0);
    const int steps = 200;
    std::vector<Triplet<Real>> stream;
    for (int i = 0; i < steps; ++i) stream.push_back(sampler.next());
    const auto start = std::chrono::steady_clock::now();
    for (const auto& t : stream) diag_step_inplace(model, t);
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() / steps;
  };
  // warm up and take the best of three to damp scheduler noise
  double base = 1e9, doubled = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    base = std::min(base, time_per_step(128));
    doubled = std::min(doubled, time_per_step(256));
  }
  const double ratio = doubled / base;
  MESSAGE("area-scaling ratio (predicted 4): " << ratio);
  CHECK(ratio > 4.0 / 3.0);
  CHECK(ratio < 12.0);
}
