// SPDX-License-Identifier: Apache-2.0
// nids: command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 numeric failure.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "nids/errors.hpp"
#include "nids/smote.hpp"

namespace {

using nids::cli::Knobs;

struct KnobSpec {
  const char* key;
  const char* help;
};

// Value-taking training knobs; keys double as config-file keys.
constexpr KnobSpec kValueKnobs[] = {
    {"hidden", "LSTM hidden units (default 64)"},
    {"seq-len", "timesteps each record is split into (default 4)"},
    {"dropout", "dropout rate on the final hidden state (default 0.2)"},
    {"loss", "loss function: ce or focal (default focal)"},
    {"gamma", "focal loss focusing parameter (default 2)"},
    {"alpha", "class weights: uniform, inverse-frequency or explicit:<a0,a1,...> (default inverse-frequency)"},
    {"smote-k", "SMOTE neighbourhood size (default 5)"},
    {"smote-policy", "SMOTE target: match-majority, ratio:<r> or explicit:<n0,n1,...>"},
    {"lr", "Adam learning rate (default 0.001)"},
    {"beta1", "Adam first-moment decay (default 0.9)"},
    {"beta2", "Adam second-moment decay (default 0.999)"},
    {"eps", "Adam epsilon (default 1e-8)"},
    {"clip-norm", "global gradient-norm clip (default 5)"},
    {"batch-size", "mini-batch size (default 1024)"},
    {"epochs", "training epochs (default 30)"},
    {"seed", "seed for every random stream (default 0)"},
};

// Options are registered in the order given so that CLI11 callbacks append
// to `knobs.values` in command-line order.
void add_knobs(CLI::App& cmd, Knobs& knobs, bool with_smote_switch) {
  cmd.add_option("--config", knobs.config_file, "key = value run configuration; flags override it")
      ->check(CLI::ExistingFile);
  for (const auto& spec : kValueKnobs) {
    cmd.add_option_function<std::string>(
        std::string("--") + spec.key,
        [&knobs, key = std::string(spec.key)](const std::string& v) { knobs.values.emplace_back(key, v); },
        spec.help);
  }
  const auto add_switch = [&](const std::string& key, const std::string& on_help, const std::string& off_help) {
    auto* on = cmd.add_flag_function(
        "--" + key, [&knobs, key](std::int64_t) { knobs.values.emplace_back(key, "true"); }, on_help);
    auto* off = cmd.add_flag_function(
        "--no-" + key, [&knobs, key](std::int64_t) { knobs.values.emplace_back(key, "false"); }, off_help);
    on->excludes(off);
  };
  if (with_smote_switch) {
    add_switch("smote", "oversample minority classes with SMOTE before training", "train on the data as given (default)");
  }
  add_switch("shuffle", "reshuffle the training rows every epoch (default)", "keep the training rows in file order");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Network intrusion detection: flow preprocessing, SMOTE, LSTM training and evaluation.", "nids");
  app.set_help_flag();
  app.set_help_all_flag("-h,--help", "Print help for every subcommand and flag");
  app.require_subcommand(1);
  app.footer("Run directories default to $NIDS_RUN_DIR, else ./runs.\n"
             "Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.");

  nids::cli::PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Clean, encode, split and standardize raw flow CSVs");
  preprocess->add_option("--dataset", pre.dataset, "input layout: kdd99, cicids2017 or generic")->required();
  preprocess->add_option("--input", pre.inputs, "raw CSV file; repeat to merge several files")
      ->required()
      ->check(CLI::ExistingFile);
  preprocess->add_option("--out", pre.out, "output container (training split when --test-out is given)")->required();
  preprocess->add_option("--test-out", pre.test_out, "also split off a stratified test container here");
  preprocess->add_option("--test-fraction", pre.test_fraction, "fraction of each class sent to --test-out")
      ->capture_default_str();
  preprocess->add_option("--seed", pre.seed, "seed for the split and the sample")->capture_default_str();
  preprocess->add_option("--label-map", pre.label_map, "raw label -> class map file (key = value lines)")
      ->check(CLI::ExistingFile);
  preprocess->add_option("--label-column", pre.label_column, "label column name (generic layout)")
      ->capture_default_str();
  preprocess->add_option("--categorical", pre.categorical, "categorical column name (generic layout); repeatable");
  preprocess->add_option("--sample", pre.sample, "keep a stratified sample of about this many rows");
  preprocess->add_option("--apply", pre.apply, "reuse the preprocessing fitted for this container instead of fitting")
      ->check(CLI::ExistingFile);

  nids::cli::SmoteArgs sm;
  auto* smote = app.add_subcommand("smote", "Oversample a container's minority classes");
  smote->add_option("--data", sm.data, "input container")->required()->check(CLI::ExistingFile);
  smote->add_option("--out", sm.out, "output container")->required();
  smote->add_option("--smote-k", sm.k, "neighbourhood size")->capture_default_str();
  smote->add_option("--smote-policy", sm.policy, "match-majority, ratio:<r> or explicit:<n0,n1,...>")
      ->capture_default_str();
  smote->add_option("--seed", sm.seed, "seed for the synthetic draws")->capture_default_str();

  nids::cli::TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train an LSTM classifier on a container");
  train->add_option("--data", tr.data, "training container")->required()->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "run directory");
  train->add_option("--holdout", tr.holdout, "container scored after every epoch")->check(CLI::ExistingFile);
  train->add_option("--resume", tr.resume, "checkpoint to continue training from")->check(CLI::ExistingFile);
  add_knobs(*train, tr.knobs, true);

  nids::cli::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a container with a checkpoint");
  evaluate->add_option("--model", ev.model, "checkpoint")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", ev.data, "container to score")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "directory for metrics.json and confusion.csv");

  nids::cli::ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Train and score the SMOTE / loss ablation arms");
  experiment->add_option("--data", ex.data, "training container")->required()->check(CLI::ExistingFile);
  experiment->add_option("--test", ex.test, "test container")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", ex.out, "run directory");
  experiment->add_option("--arms", ex.arms, "comma-separated subset of nosmote_ce, smote_ce, smote_focal (default all)")
      ->delimiter(',');
  add_knobs(*experiment, ex.knobs, false);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Describe a container or checkpoint");
  inspect->add_option("path", inspect_path, "file to describe")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*preprocess) nids::cli::run_preprocess(pre);
    if (*smote) nids::cli::run_smote(sm);
    if (*train) nids::cli::run_train(tr);
    if (*evaluate) nids::cli::run_evaluate(ev);
    if (*experiment) nids::cli::run_experiment_command(ex);
    if (*inspect) nids::cli::run_inspect(inspect_path);
  } catch (const nids::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nids::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
