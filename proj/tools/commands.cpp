// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "nids/checkpoint.hpp"
#include "nids/csv.hpp"
#include "nids/dataset.hpp"
#include "nids/errors.hpp"
#include "nids/label_map.hpp"
#include "nids/pipeline.hpp"
#include "nids/smote.hpp"

namespace nids::cli {

namespace {

void log(std::string_view msg) { std::cerr << msg << '\n'; }

void print_histogram(std::string_view title, const FlowTable& table) {
  std::cerr << title << ": " << table.num_rows() << " rows\n";
  const auto hist = table.histogram();
  for (std::size_t k = 0; k < hist.size(); ++k) std::cerr << "  " << table.class_names[k] << ": " << hist[k] << '\n';
}

Schema schema_for(const PreprocessArgs& args) {
  switch (parse_dataset_kind(args.dataset)) {
    case DatasetKind::kKdd99:
      return kdd99_schema();
    case DatasetKind::kCicids2017:
      return cicids2017_schema();
    case DatasetKind::kGeneric:
      return generic_schema(args.label_column, args.categorical);
  }
  throw UsageError("unknown dataset kind");
}

LabelMap label_map_for(const PreprocessArgs& args, const RawTable& rows) {
  if (args.label_map) return LabelMap::load(*args.label_map);
  const DatasetKind kind = rows.schema().kind;
  if (kind != DatasetKind::kGeneric) return LabelMap::bundled(kind);
  // Without a map, every distinct raw label is its own class.
  std::set<std::string> seen(rows.labels().begin(), rows.labels().end());
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& l : seen) pairs.emplace_back(l, l);
  return LabelMap(pairs);
}

std::filesystem::path run_dir(const std::optional<std::filesystem::path>& out) {
  return out ? *out : default_run_dir();
}

}  // namespace

RunConfig Knobs::resolve() const {
  RunConfig cfg = config_file ? RunConfig::load(*config_file) : RunConfig{};
  for (const auto& [key, value] : values) cfg.set(key, value);
  cfg.validate();
  return cfg;
}

std::filesystem::path default_run_dir() {
  const char* env = std::getenv("NIDS_RUN_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

void run_preprocess(const PreprocessArgs& args) {
  if (args.apply && args.test_out) throw UsageError("--apply and --test-out cannot be combined");
  const Schema schema = schema_for(args);
  RawTable rows(schema);
  for (std::size_t i = 0; i < args.inputs.size(); ++i) {
    RawTable part = parse_csv(args.inputs[i], schema);
    std::cerr << args.inputs[i].string() << ": " << part.num_rows() << " rows read, " << part.skipped
              << " malformed rows skipped\n";
    if (i == 0) {
      rows = std::move(part);
    } else {
      rows.append(part);
    }
  }
  CleanResult cleaned = clean(rows);
  std::cerr << "dropped " << cleaned.dropped << " rows with NaN/Inf or unparsable values, kept "
            << cleaned.table.num_rows() << '\n';
  for (const auto& [column, count] : cleaned.drops_by_column) {
    std::cerr << "  " << column << ": " << count << " rows"
              << (count == rows.num_rows() ? " (every row; should it be --categorical?)" : "") << '\n';
  }

  const LabelMap labels = label_map_for(args, cleaned.table);
  if (args.sample) {
    const auto y = map_labels(cleaned.table.labels(), labels);
    const auto keep = stratified_sample(y, labels.num_classes(), *args.sample, args.seed);
    cleaned.table = cleaned.table.select(keep);
    std::cerr << "stratified sample: " << cleaned.table.num_rows() << " rows\n";
  }

  if (args.apply) {
    const Dataset fitted = Dataset::load(*args.apply);
    Dataset out{fitted.preprocessor, fitted.preprocessor.transform(cleaned.table, labels)};
    out.save(args.out);
    print_histogram("written " + args.out.string(), out.table);
    return;
  }

  PrepareOptions opts;
  opts.split = args.test_out.has_value();
  opts.test_fraction = args.test_fraction;
  opts.seed = args.seed;
  PreparedData prepared = prepare(cleaned.table, labels, opts);
  for (const auto& w : prepared.warnings) std::cerr << "warning: " << w << '\n';
  prepared.train.save(args.out);
  print_histogram("written " + args.out.string(), prepared.train.table);
  if (prepared.test) {
    prepared.test->save(*args.test_out);
    print_histogram("written " + args.test_out->string(), prepared.test->table);
  }
}

void run_smote(const SmoteArgs& args) {
  const Dataset in = Dataset::load(args.data);
  SmoteConfig cfg{args.k, TargetPolicy::parse(args.policy), args.seed};
  SmoteResult res = smote_oversample(in.table, cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  Dataset out{in.preprocessor, std::move(res.table)};
  out.save(args.out);
  std::cerr << res.synthetic.size() << " synthetic rows added\n";
  print_histogram("written " + args.out.string(), out.table);
}

void run_train(const TrainArgs& args) {
  const RunConfig cfg = args.knobs.resolve();
  const Dataset data = Dataset::load(args.data);
  std::optional<Dataset> holdout;
  std::optional<Checkpoint> resume;
  if (args.holdout) holdout = Dataset::load(*args.holdout);
  if (args.resume) resume = Checkpoint::load(*args.resume);

  TrainOptions opts;
  opts.holdout = holdout ? &*holdout : nullptr;
  opts.resume = resume ? &*resume : nullptr;
  opts.log = log;
  const TrainResult res = train(cfg, data, opts);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';

  const auto dir = run_dir(args.out);
  const auto outputs = write_run_files(dir, "", res.checkpoint, nullptr);
  std::vector<std::filesystem::path> inputs = {args.data};
  if (args.holdout) inputs.push_back(*args.holdout);
  if (args.resume) inputs.push_back(*args.resume);
  write_manifest(dir, cfg, inputs, outputs);
  std::cerr << "run written to " << dir.string() << '\n';
}

void run_evaluate(const EvaluateArgs& args) {
  const Checkpoint ck = Checkpoint::load(args.model);
  const Dataset data = Dataset::load(args.data);
  const Evaluation ev = evaluate(ck, data);

  const auto dir = run_dir(args.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, text] : {std::pair{"metrics.json", ev.report.to_json()},
                                   std::pair{"confusion.csv", ev.confusion.to_csv()}}) {
    std::ofstream out(dir / name, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write " + (dir / name).string());
  }
  std::cerr << "accuracy " << ev.report.overall_accuracy << " on " << ev.report.samples << " rows\n";
  for (const auto& m : ev.report.classes) {
    std::cerr << "  " << m.name << ": PPV " << m.ppv << ", TPR " << m.tpr << ", F1 " << m.f1 << '\n';
  }
  std::cerr << "written " << (dir / "metrics.json").string() << '\n';
}

void run_experiment_command(const ExperimentArgs& args) {
  const RunConfig cfg = args.knobs.resolve();
  std::vector<Arm> arms;
  for (const auto& a : args.arms) arms.push_back(parse_arm(a));
  if (arms.empty()) arms.assign(std::begin(kAllArms), std::end(kAllArms));

  const Dataset train_data = Dataset::load(args.data);
  const Dataset test_data = Dataset::load(args.test);
  const auto results = run_experiment(cfg, train_data, test_data, arms, log);

  const auto dir = run_dir(args.out);
  std::vector<std::string> outputs;
  for (const auto& r : results) {
    for (auto& name : write_run_files(dir, to_string(r.arm), r.training.checkpoint, &r.evaluation)) {
      outputs.push_back(std::move(name));
    }
    std::cerr << to_string(r.arm) << ": accuracy " << r.evaluation.report.overall_accuracy << ", macro F1 "
              << r.evaluation.report.macro.f1 << '\n';
  }
  const std::vector<std::filesystem::path> inputs = {args.data, args.test};
  write_manifest(dir, cfg, inputs, outputs);
  std::cerr << "experiment written to " << dir.string() << '\n';
}

void run_inspect(const std::filesystem::path& path) { std::cout << inspect_file(path); }

}  // namespace nids::cli
