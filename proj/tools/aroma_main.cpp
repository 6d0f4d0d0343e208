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
#include "aroma/trace.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

// exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online bilinear similarity learning with adaptive "
               "second-order regularization"};
  app.require_subcommand(1);

  // prep
  aroma::PrepOptions prep;
  long long infogain_k = 0;
  auto* prep_cmd =
      app.add_subcommand("prep", "transform a corpus (tf-idf, feature selection)");
  prep_cmd->add_option("input", prep.input, "corpus file to read")->required();
  prep_cmd->add_option("output", prep.output, "corpus file to write")->required();
  prep_cmd->add_flag("--tfidf", prep.tfidf, "apply tf-idf weighting");
  auto* infogain_opt = prep_cmd->add_option(
      "--infogain", infogain_k, "keep the top-k features by information gain");

  // train
  aroma::TrainOptions train;
  std::string train_algo = "d-aroma";
  std::string train_mode = "margin";
  auto* train_cmd = app.add_subcommand("train", "train a model on seeded triplets");
  train_cmd->add_option("--algo", train_algo,
                        "d-aroma | f-aroma | f-aroma-analysis | arow-vec | pa | identity");
  train_cmd->add_option("--r", train.regularizer, "regularizer r");
  train_cmd->add_option("--iters", train.iterations, "number of triplets");
  train_cmd->add_option("--seed", train.seed, "sampling seed");
  train_cmd->add_option("--train", train.train_path, "training corpus")->required();
  train_cmd->add_option("--model-out", train.model_out, "model file to write")
      ->required();
  train_cmd->add_option("--trace-out", train.trace_out, "run trace to write");
  train_cmd->add_option("--update-mode", train_mode, "margin | mistake");

  // eval
  aroma::EvalCmdOptions eval;
  std::vector<long long> eval_ks;
  auto* eval_cmd = app.add_subcommand("eval", "precision@k and mAP of a model");
  eval_cmd->add_option("model", eval.model_path, "model file")->required();
  eval_cmd->add_option("--eval", eval.eval_path, "evaluation corpus")->required();
  eval_cmd->add_option("--k", eval_ks, "comma-separated k list")->delimiter(',');
  eval_cmd->add_option("--out", eval.out_path, "report file (default: stdout)");

  // sweep
  aroma::SweepOptions sweep;
  std::string sweep_algo = "d-aroma";
  std::string sweep_mode = "margin";
  std::vector<double> sweep_rs;
  std::vector<long long> sweep_ks;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "regularizer sensitivity: train/eval per r");
  sweep_cmd->add_option("--algo", sweep_algo, "learner to sweep");
  sweep_cmd->add_option("--sweep-r", sweep_rs, "comma-separated r values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--iters", sweep.base.iterations, "triplets per run");
  sweep_cmd->add_option("--seed", sweep.base.seed, "base seed");
  sweep_cmd->add_option("--train", sweep.base.train_path, "training corpus")
      ->required();
  sweep_cmd->add_option("--eval", sweep.eval_path, "evaluation corpus")->required();
  sweep_cmd->add_option("--k", sweep_ks, "comma-separated k list")->delimiter(',');
  sweep_cmd->add_option("--update-mode", sweep_mode, "margin | mistake");
  sweep_cmd->add_option("--out", sweep.out_path, "CSV file (default: stdout)");

  // verify
  aroma::VerifyOptions verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "check the mistake bounds on a run trace");
  verify_cmd->add_option("trace", verify.trace_path, "trace file")->required();
  verify_cmd->add_option("--comparators", verify.random_comparators,
                         "number of random comparator matrices");
  verify_cmd->add_option("--seed", verify.seed, "comparator seed");
  verify_cmd->add_option("--comparator-file", verify.comparator_path,
                         "JSON matrix (or model file) with a known comparator");
  verify_cmd->add_option("--out", verify.out_path, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kUsageError;
  }

  try {
    if (prep_cmd->parsed()) {
      if (*infogain_opt) prep.infogain = static_cast<aroma::Index>(infogain_k);
      aroma::run_prep(prep);
    } else if (train_cmd->parsed()) {
      train.algo = aroma::algo_from_string(train_algo);
      train.update_mode = aroma::update_mode_from_string(train_mode);
      aroma::run_train(train);
    } else if (eval_cmd->parsed()) {
      eval.k_values.assign(eval_ks.begin(), eval_ks.end());
      aroma::run_eval(eval);
    } else if (sweep_cmd->parsed()) {
      sweep.base.algo = aroma::algo_from_string(sweep_algo);
      sweep.base.update_mode = aroma::update_mode_from_string(sweep_mode);
      sweep.r_values.assign(sweep_rs.begin(), sweep_rs.end());
      sweep.k_values.assign(sweep_ks.begin(), sweep_ks.end());
      aroma::run_sweep(sweep);
    } else if (verify_cmd->parsed()) {
      if (!aroma::run_verify(verify)) {
        std::cerr << "verification failed: a bound was violated\n";
        return kNumericalError;
      }
    }
  } catch (const aroma::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const aroma::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
