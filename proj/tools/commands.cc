//
// Copyright 2026 The dpsynth Authors.
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
//

#include "commands.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "dpsynth/checkpoint.h"
#include "dpsynth/downstream_eval.h"
#include "dpsynth/privacy_accountant.h"
#include "dpsynth/report_io.h"
#include "dpsynth/rng.h"
#include "dpsynth/schema_io.h"
#include "dpsynth/status_macros.h"
#include "dpsynth/synthesizer.h"
#include "json.hpp"
#include "run_config.h"

namespace dpsynth::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr char kModelFile[] = "model.json";
inline constexpr char kSyntheticFile[] = "synthetic.csv";
inline constexpr char kProvenanceFile[] = "provenance.json";
inline constexpr char kReportFile[] = "report.json";

// Flags that override RunConfig fields.
struct ConfigFlags {
  std::string config;
  std::optional<std::string> data, dataset_id, schema, label, output_dir;
  std::optional<double> epsilon, delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> batch_size;
  std::optional<int> epochs;
  std::optional<double> learning_rate, clip_norm, noise_multiplier;
  bool tune = false;
  std::optional<int> repeats;
  std::vector<std::string> models;
  std::optional<double> timeout;
  bool no_baseline = false;
  bool no_runtime = false;
  std::vector<std::size_t> factors;
};

struct Flags {
  ConfigFlags run;
  bool write_splits = false;
  // infer-schema
  std::string csv;
  std::string output;
  std::string label;
  // synth
  std::string model;
  std::string data;
  std::string schema;
  std::uint64_t seed = 0;
  std::optional<std::string> output_dir;
  std::size_t oversample = 1;
  // eval
  std::string train;
  std::string test;
  std::vector<std::string> models;
  std::string dataset_id;
  std::string synthesizer_id = kSynthesizerId;
  bool no_runtime = false;
  // accountant
  std::int64_t num_examples = 0;
  std::int64_t batch_size = 0;
  std::int64_t epochs = 0;
  double delta = kDefaultDelta;
  std::optional<double> noise_multiplier;
  std::optional<double> epsilon;
};

struct Commands {
  CLI::App* infer_schema;
  CLI::App* train;
  CLI::App* synth;
  CLI::App* eval;
  CLI::App* bench;
  CLI::App* scale;
  CLI::App* accountant;
  CLI::App* pipeline;
};

void AddCoreConfigFlags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("-c,--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--data", f.data, "Dataset CSV");
  cmd->add_option("--dataset-id", f.dataset_id, "Dataset name used in reports");
  cmd->add_option("--schema", f.schema, "Schema JSON for the dataset");
  cmd->add_option("--label", f.label, "Label column (default: last column)");
  cmd->add_option("--epsilon", f.epsilon, "Privacy budget epsilon");
  cmd->add_option("--delta", f.delta, "Privacy budget delta");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("-o,--output-dir", f.output_dir, "Output directory");
  cmd->add_option("--batch-size", f.batch_size, "Expected DP-SGD batch size b");
  cmd->add_option("--epochs", f.epochs, "DP-SGD epochs E");
  cmd->add_option("--learning-rate", f.learning_rate, "DP-SGD learning rate");
  cmd->add_option("--clip-norm", f.clip_norm, "Clipping bound C (default: warm-up median)");
  cmd->add_option("--noise-multiplier", f.noise_multiplier,
                  "Noise multiplier z (default: calibrated to the budget)");
  cmd->add_flag("--tune", f.tune, "Grid-search b, E and the learning rate on validation data");
}

void AddEvalConfigFlags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--repeats", f.repeats, "Repeats averaged per cell");
  cmd->add_option("--models", f.models, "Downstream models (mlp, linear_svm)")->delimiter(',');
  cmd->add_option("--timeout", f.timeout, "Per-cell wall-clock limit in seconds");
  cmd->add_flag("--no-baseline", f.no_baseline, "Skip the non-private baseline rows");
  cmd->add_flag("--no-runtime", f.no_runtime, "Report runtimes as 0 for reproducible output");
}

Commands BuildApp(CLI::App& app, Flags& f) {
  app.require_subcommand(1);
  app.set_help_flag("-h,--help", "Print this help message and exit");
  Commands c{};

  c.infer_schema = app.add_subcommand("infer-schema", "Infer a JSON schema from a CSV file");
  c.infer_schema->add_option("csv", f.csv, "Input CSV")->required()->check(CLI::ExistingFile);
  c.infer_schema->add_option("--label", f.label, "Label column (default: last column)");
  c.infer_schema->add_option("-o,--output", f.output, "Schema file (default: stdout)");

  c.train = app.add_subcommand("train", "Train the DP labelling model");
  AddCoreConfigFlags(c.train, f.run);
  c.train->add_flag("--write-splits", f.write_splits,
                    "Also write train.csv, validation.csv and test.csv");

  c.synth = app.add_subcommand("synth", "Synthesize a dataset with a trained model");
  c.synth->add_option("--model", f.model, "Model checkpoint")->required()->check(
      CLI::ExistingFile);
  c.synth->add_option("--data", f.data, "Source CSV (the model's training split)")
      ->required()
      ->check(CLI::ExistingFile);
  c.synth->add_option("--schema", f.schema, "Schema JSON for the source CSV");
  c.synth->add_option("--seed", f.seed, "Shuffle seed");
  c.synth->add_option("--oversample", f.oversample, "Resample rows to this multiple first");
  c.synth->add_option("-o,--output-dir", f.output_dir, "Output directory");

  c.eval = app.add_subcommand("eval", "Train downstream models on one CSV, test on another");
  c.eval->add_option("--train", f.train, "Training CSV (e.g. synthetic)")->required()->check(
      CLI::ExistingFile);
  c.eval->add_option("--test", f.test, "Real held-out test CSV")->required()->check(
      CLI::ExistingFile);
  c.eval->add_option("--schema", f.schema, "Schema JSON shared by both files");
  c.eval->add_option("--label", f.label, "Label column (default: last column)");
  c.eval->add_option("--models", f.models, "Downstream models (mlp, linear_svm)")
      ->delimiter(',');
  c.eval->add_option("--seed", f.seed, "Downstream training seed");
  c.eval->add_option("--dataset-id", f.dataset_id, "Dataset name used in reports");
  c.eval->add_option("--synthesizer-id", f.synthesizer_id, "Method name used in reports");
  c.eval->add_flag("--no-runtime", f.no_runtime, "Report runtimes as 0");
  c.eval->add_option("-o,--output-dir", f.output_dir, "Output directory");

  c.bench = app.add_subcommand("bench", "Repeated split/train/synthesize/evaluate benchmark");
  AddCoreConfigFlags(c.bench, f.run);
  AddEvalConfigFlags(c.bench, f.run);

  c.scale = app.add_subcommand("scale", "Benchmark on bootstrap-enlarged copies of the data");
  AddCoreConfigFlags(c.scale, f.run);
  AddEvalConfigFlags(c.scale, f.run);
  c.scale->add_option("--factors", f.run.factors, "Scale factors, subset of 1,2,3")
      ->delimiter(',');

  c.accountant = app.add_subcommand("accountant", "Epsilon for z, or z for epsilon");
  c.accountant->add_option("-n,--num-examples", f.num_examples, "Training set size N")
      ->required();
  c.accountant->add_option("-b,--batch-size", f.batch_size, "Expected batch size b")
      ->required();
  c.accountant->add_option("-e,--epochs", f.epochs, "Epochs E")->required();
  c.accountant->add_option("--delta", f.delta, "Target delta");
  auto* z = c.accountant->add_option("-z,--noise-multiplier", f.noise_multiplier,
                                     "Noise multiplier; reports its epsilon");
  auto* eps = c.accountant->add_option("--epsilon", f.epsilon,
                                       "Target epsilon; reports the smallest z meeting it");
  z->excludes(eps);
  eps->excludes(z);

  c.pipeline = app.add_subcommand(
      "pipeline", "End to end: train, synthesize, evaluate; writes 4 artifacts");
  AddCoreConfigFlags(c.pipeline, f.run);
  c.pipeline->add_option("--models", f.run.models, "Downstream models (mlp, linear_svm)")
      ->delimiter(',');
  c.pipeline->add_flag("--no-runtime", f.run.no_runtime, "Report runtimes as 0");

  app.footer(absl::StrCat(
      "Exit codes: 0 ok, 2 configuration, 3 data, 4 training, 5 evaluation, 6 infeasible "
      "budget.\nConfig precedence: flags > $",
      kOutputDirEnv, " (output dir only) > --config file > defaults."));
  return c;
}

void ConfigureApp(CLI::App& app) {
  app.name("dpsynth");
  app.description("Differentially private synthetic tabular data");
  app.get_formatter()->column_width(34);
}

int Fail(std::ostream& err, int code, std::string_view stage, const absl::Status& status) {
  if (IsInfeasibleBudget(status)) code = kExitInfeasibleBudget;
  err << "dpsynth: " << stage << ": " << status.message() << "\n";
  return code;
}

std::string OutputDirFromEnv(std::string fallback) {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : fallback;
}

absl::StatusOr<RunConfig> ResolveConfig(const ConfigFlags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    ASSIGN_OR_RETURN(c, LoadRunConfig(f.config));
  }
  c.output_dir = OutputDirFromEnv(c.output_dir);
  if (f.data) c.dataset = *f.data;
  if (f.dataset_id) c.dataset_id = *f.dataset_id;
  if (f.schema) c.schema = *f.schema;
  if (f.label) c.label = *f.label;
  if (f.output_dir) c.output_dir = *f.output_dir;
  if (f.epsilon) c.budget.epsilon = *f.epsilon;
  if (f.delta) c.budget.delta = *f.delta;
  if (f.seed) c.seed = *f.seed;
  if (f.batch_size) c.trainer.batch_size = *f.batch_size;
  if (f.epochs) c.trainer.epochs = *f.epochs;
  if (f.learning_rate) c.trainer.learning_rate = *f.learning_rate;
  if (f.clip_norm) c.trainer.clip_norm = *f.clip_norm;
  if (f.noise_multiplier) c.trainer.noise_multiplier = *f.noise_multiplier;
  if (f.tune) c.trainer.tune = true;
  if (f.repeats) c.repeats = *f.repeats;
  if (!f.models.empty()) {
    c.models.clear();
    for (const std::string& m : f.models) {
      ASSIGN_OR_RETURN(DownstreamModelKind kind, ParseDownstreamModelKind(m));
      c.models.push_back(kind);
    }
  }
  if (f.timeout) c.timeout_s = *f.timeout;
  if (f.no_baseline) c.include_baseline = false;
  if (f.no_runtime) c.record_runtime = false;
  if (!f.factors.empty()) c.scale_factors = f.factors;
  if (c.dataset.empty()) {
    return absl::InvalidArgumentError("no dataset: pass --data or set \"dataset\" in --config");
  }
  RETURN_IF_ERROR(ValidateRunConfig(c));
  return c;
}

absl::StatusOr<std::vector<DownstreamModelKind>> ParseKinds(
    const std::vector<std::string>& names) {
  if (names.empty()) {
    return std::vector<DownstreamModelKind>{DownstreamModelKind::kMlp,
                                            DownstreamModelKind::kLinearSvm};
  }
  std::vector<DownstreamModelKind> kinds;
  for (const std::string& n : names) {
    ASSIGN_OR_RETURN(DownstreamModelKind k, ParseDownstreamModelKind(n));
    kinds.push_back(k);
  }
  return kinds;
}

absl::StatusOr<TabularDataset> LoadDataset(const std::string& path, const std::string& schema,
                                           const std::string& label,
                                           const PreprocessPolicy* policy) {
  CsvLoadOptions options;
  options.label = label;
  if (!schema.empty()) {
    ASSIGN_OR_RETURN(options.schema_hint, LoadSchema(schema));
  }
  ASSIGN_OR_RETURN(TabularDataset d, LoadCsv(path, options));
  if (policy == nullptr) return d;
  return Preprocess(d, *policy);
}

absl::StatusOr<TabularDataset> LoadDataset(const RunConfig& c) {
  return LoadDataset(c.dataset, c.schema, c.label, &c.preprocess);
}

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create output directory '", dir, "': ", ec.message()));
  }
  return absl::OkStatus();
}

std::string InDir(const std::string& dir, std::string_view name) {
  return (fs::path(dir) / name).string();
}

// Union of two inferred schemas for the same columns.
absl::StatusOr<Schema> MergeSchemas(const Schema& a, const Schema& b) {
  if (a.attributes.size() != b.attributes.size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "files have ", a.attributes.size(), " and ", b.attributes.size(), " attributes"));
  }
  auto merge = [](const AttributeSpec& x, const AttributeSpec& y) -> absl::StatusOr<AttributeSpec> {
    if (x.name != y.name || x.kind != y.kind) {
      return absl::FailedPreconditionError(absl::StrCat(
          "column '", x.name, "' (", AttributeKindName(x.kind), ") does not match '", y.name,
          "' (", AttributeKindName(y.kind), ")"));
    }
    if (!x.is_categorical()) {
      AttributeSpec out = x;
      out.min = std::min(x.min, y.min);
      out.max = std::max(x.max, y.max);
      return out;
    }
    std::vector<std::string_view> values(x.categories.begin(), x.categories.end());
    for (const std::string& v : y.categories) {
      if (!x.CategoryIndex(v)) values.push_back(v);
    }
    return InferAttribute(x.name, values, /*force_categorical=*/true);
  };
  Schema out;
  for (std::size_t j = 0; j < a.attributes.size(); ++j) {
    ASSIGN_OR_RETURN(AttributeSpec s, merge(a.attributes[j], b.attributes[j]));
    out.attributes.push_back(std::move(s));
  }
  ASSIGN_OR_RETURN(out.label, merge(a.label, b.label));
  out.positive_label = a.positive_label;
  return out;
}

std::string ProvenanceJson(const SyntheticDataset& synth, const TrainedModel& model,
                           std::string_view csv_name, std::string_view csv_bytes,
                           std::string_view config_hash) {
  const SyntheticProvenance& p = synth.provenance;
  Json j = Json::object();
  j["format"] = "dpsynth-provenance";
  j["version"] = 1;
  j["synthetic_csv"] = Json{{"path", csv_name},
                            {"content_id", ContentId(csv_bytes)},
                            {"rows", synth.num_rows()}};
  j["model_id"] = p.model_id;
  j["seed"] = p.seed;
  j["budget"] = Json{{"epsilon", p.budget.epsilon}, {"delta", p.budget.delta}};
  j["epsilon_spent"] = p.epsilon_spent;
  j["noise_multiplier"] = p.noise_multiplier;
  j["clip_norm"] = model.config.clip_norm;
  j["batch_size"] = model.config.batch_size;
  j["epochs"] = model.config.epochs;
  j["learning_rate"] = model.config.learning_rate;
  j["steps"] = model.config.steps();
  j["noise_placement"] = kNoisePlacement;
  j["batch_sampling"] = kBatchSampling;
  j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

int CmdInferSchema(const Flags& f, std::ostream& out, std::ostream& err) {
  auto d = LoadDataset(f.csv, "", f.label, nullptr);
  if (!d.ok()) return Fail(err, kExitData, "infer-schema", d.status());
  if (d->num_attributes() == 0) {
    return Fail(err, kExitData, "infer-schema",
                absl::InvalidArgumentError("no attribute columns besides the label"));
  }
  const std::string json = SchemaToJson(d->schema());
  if (f.output.empty()) {
    out << json;
    return kExitOk;
  }
  if (auto s = WriteFile(f.output, json); !s.ok()) return Fail(err, kExitConfig, "output", s);
  return kExitOk;
}

int CmdTrain(const Flags& f, std::ostream& out, std::ostream& err) {
  auto config = ResolveConfig(f.run);
  if (!config.ok()) return Fail(err, kExitConfig, "config", config.status());
  const RunConfig& c = *config;
  if (auto s = EnsureDir(c.output_dir); !s.ok()) return Fail(err, kExitConfig, "output", s);
  auto data = LoadDataset(c);
  if (!data.ok()) return Fail(err, kExitData, "data", data.status());
  auto split = Split(*data, DeriveSeed(c.seed, SeedStream::kSplit));
  if (!split.ok()) return Fail(err, kExitData, "split", split.status());
  auto model = TrainPrivateModel(*split, c.trainer, c.budget, c.seed);
  if (!model.ok()) return Fail(err, kExitTraining, "training", model.status());
  const std::string hash = ConfigHash(c);
  const std::string model_path = InDir(c.output_dir, kModelFile);
  if (auto s = SaveCheckpoint(*model, model_path, hash); !s.ok()) {
    return Fail(err, kExitConfig, "output", s);
  }
  if (f.write_splits) {
    const std::pair<const char*, const TabularDataset*> parts[] = {
        {"train.csv", &split->train}, {"validation.csv", &split->validation},
        {"test.csv", &split->test}};
    for (const auto& [name, d] : parts) {
      if (auto s = WriteCsv(*d, InDir(c.output_dir, name)); !s.ok()) {
        return Fail(err, kExitConfig, "output", s);
      }
    }
  }
  out << model_path << ": epsilon_spent=" << model->epsilon_spent
      << " noise_multiplier=" << model->config.noise_multiplier
      << " clip_norm=" << model->config.clip_norm << "\n";
  return kExitOk;
}

int CmdSynth(const Flags& f, std::ostream& out, std::ostream& err) {
  const std::string dir = f.output_dir ? *f.output_dir : OutputDirFromEnv("dpsynth_out");
  if (auto s = EnsureDir(dir); !s.ok()) return Fail(err, kExitConfig, "output", s);
  std::string hash;
  auto model = LoadCheckpoint(f.model, &hash);
  if (!model.ok()) return Fail(err, kExitData, "model", model.status());
  auto data = LoadDataset(f.data, f.schema, model->encoding.label.name, nullptr);
  if (!data.ok()) return Fail(err, kExitData, "data", data.status());
  auto synth = Synthesize(*data, *model, f.seed, {.oversample_factor = f.oversample});
  if (!synth.ok()) return Fail(err, kExitTraining, "synthesis", synth.status());
  auto table = synth->ToDataset();
  if (!table.ok()) return Fail(err, kExitTraining, "synthesis", table.status());
  const std::string csv = FormatCsv(*table);
  const std::string csv_path = InDir(dir, kSyntheticFile);
  const std::string prov_path = InDir(dir, "synthetic.provenance.json");
  for (const auto& [path, bytes] :
       {std::pair{csv_path, csv},
        std::pair{prov_path, ProvenanceJson(*synth, *model, kSyntheticFile, csv, hash)}}) {
    if (auto s = WriteFile(path, bytes); !s.ok()) return Fail(err, kExitConfig, "output", s);
  }
  out << csv_path << "\n" << prov_path << "\n";
  return kExitOk;
}

int CmdEval(const Flags& f, std::ostream& out, std::ostream& err) {
  auto kinds = ParseKinds(f.models);
  if (!kinds.ok()) return Fail(err, kExitConfig, "config", kinds.status());
  const std::string dir = f.output_dir ? *f.output_dir : OutputDirFromEnv("dpsynth_out");
  if (auto s = EnsureDir(dir); !s.ok()) return Fail(err, kExitConfig, "output", s);
  std::string schema_path = f.schema;
  auto test = LoadDataset(f.test, schema_path, f.label, nullptr);
  if (!test.ok()) return Fail(err, kExitData, "test data", test.status());
  auto train = LoadDataset(f.train, schema_path, f.label, nullptr);
  if (!train.ok()) return Fail(err, kExitData, "train data", train.status());
  if (schema_path.empty()) {
    auto merged = MergeSchemas(train->schema(), test->schema());
    if (!merged.ok()) return Fail(err, kExitData, "schema", merged.status());
    CsvLoadOptions options;
    options.schema_hint = *merged;
    test = LoadCsv(f.test, options);
    if (!test.ok()) return Fail(err, kExitData, "test data", test.status());
    train = LoadCsv(f.train, options);
    if (!train.ok()) return Fail(err, kExitData, "train data", train.status());
  }
  const std::string dataset_id =
      f.dataset_id.empty() ? fs::path(f.test).stem().string() : f.dataset_id;
  auto reports = EvaluateDataset(*train, *test, dataset_id, f.synthesizer_id, *kinds, {},
                                 f.seed, !f.no_runtime);
  if (!reports.ok()) return Fail(err, kExitEvaluation, "evaluation", reports.status());
  const std::string summary = SummaryCsv(*reports);
  for (const auto& [name, bytes] : {std::pair{"eval_report.json", ReportsToJson(*reports)},
                                    std::pair{"eval_summary.csv", summary}}) {
    if (auto s = WriteFile(InDir(dir, name), bytes); !s.ok()) {
      return Fail(err, kExitConfig, "output", s);
    }
  }
  out << summary;
  return kExitOk;
}

int CmdBench(const Flags& f, bool scaled, std::ostream& out, std::ostream& err) {
  auto config = ResolveConfig(f.run);
  if (!config.ok()) return Fail(err, kExitConfig, "config", config.status());
  const RunConfig& c = *config;
  if (auto s = EnsureDir(c.output_dir); !s.ok()) return Fail(err, kExitConfig, "output", s);
  auto data = LoadDataset(c);
  if (!data.ok()) return Fail(err, kExitData, "data", data.status());
  const BenchmarkOptions options = ToBenchmarkOptions(c);
  auto reports = scaled ? ScalabilityRun(*data, c.ResolvedDatasetId(), c.scale_factors, options)
                        : RunBenchmark(*data, c.ResolvedDatasetId(), options);
  if (!reports.ok()) return Fail(err, kExitEvaluation, "benchmark", reports.status());
  const std::string hash = ConfigHash(c);
  for (EvalReport& r : *reports) r.config_hash = hash;
  const std::string prefix = scaled ? "scale" : "bench";
  const std::string summary = scaled ? ScaleCsv(*reports) : SummaryCsv(*reports);
  for (const auto& [name, bytes] :
       {std::pair{prefix + "_report.json", ReportsToJson(*reports)},
        std::pair{prefix + "_summary.csv", summary}}) {
    if (auto s = WriteFile(InDir(c.output_dir, name), bytes); !s.ok()) {
      return Fail(err, kExitConfig, "output", s);
    }
  }
  out << summary;
  return kExitOk;
}

int CmdAccountant(const Flags& f, std::ostream& out, std::ostream& err) {
  if (!f.noise_multiplier && !f.epsilon) {
    return Fail(err, kExitConfig, "accountant",
                absl::InvalidArgumentError("pass --noise-multiplier or --epsilon"));
  }
  auto sampling = SamplingConfig::ForTraining(f.num_examples, f.batch_size, f.epochs);
  if (!sampling.ok()) return Fail(err, kExitConfig, "accountant", sampling.status());
  double z = 0.0;
  if (f.noise_multiplier) {
    z = *f.noise_multiplier;
  } else {
    auto noise = ComputeNoise(f.num_examples, f.batch_size, f.epochs,
                              {.epsilon = *f.epsilon, .delta = f.delta});
    if (!noise.ok()) return Fail(err, kExitConfig, "accountant", noise.status());
    z = *noise;
  }
  auto eps = ComputeEpsilonDetailed(f.num_examples, f.batch_size, f.epochs, z, f.delta);
  if (!eps.ok()) return Fail(err, kExitConfig, "accountant", eps.status());
  Json j = Json::object();
  j["num_examples"] = f.num_examples;
  j["batch_size"] = f.batch_size;
  j["epochs"] = f.epochs;
  j["sampling_rate"] = sampling->sampling_rate;
  j["steps"] = sampling->steps;
  j["z"] = z;
  j["epsilon"] = eps->epsilon;
  j["delta"] = f.delta;
  j["best_order"] = eps->order;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int CmdPipeline(const Flags& f, std::ostream& out, std::ostream& err) {
  auto config = ResolveConfig(f.run);
  if (!config.ok()) return Fail(err, kExitConfig, "config", config.status());
  const RunConfig& c = *config;
  if (auto s = EnsureDir(c.output_dir); !s.ok()) return Fail(err, kExitConfig, "output", s);
  auto data = LoadDataset(c);
  if (!data.ok()) return Fail(err, kExitData, "data", data.status());
  auto split = Split(*data, DeriveSeed(c.seed, SeedStream::kSplit));
  if (!split.ok()) return Fail(err, kExitData, "split", split.status());

  const auto start = std::chrono::steady_clock::now();
  auto model = TrainPrivateModel(*split, c.trainer, c.budget, c.seed);
  if (!model.ok()) return Fail(err, kExitTraining, "training", model.status());
  auto synth = Synthesize(split->train, *model, c.seed);
  if (!synth.ok()) return Fail(err, kExitTraining, "synthesis", synth.status());
  const double synth_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
  auto table = synth->ToDataset();
  if (!table.ok()) return Fail(err, kExitTraining, "synthesis", table.status());

  auto reports = EvaluateDataset(*table, split->test, c.ResolvedDatasetId(), kSynthesizerId,
                                 c.models, c.downstream, c.seed, c.record_runtime);
  if (!reports.ok()) return Fail(err, kExitEvaluation, "evaluation", reports.status());
  const std::string hash = ConfigHash(c);
  for (EvalReport& r : *reports) {
    r.budget = c.budget;
    r.train_rows = static_cast<std::int64_t>(split->train.num_rows());
    r.sampling_rate = static_cast<double>(model->config.batch_size) /
                      static_cast<double>(model->config.num_examples);
    r.noise_multiplier = model->config.noise_multiplier;
    r.epsilon_spent = model->epsilon_spent;
    r.synth_runtime_s = c.record_runtime ? synth_s : 0.0;
    for (RepeatResult& rr : r.repeats) rr.synth_runtime_s = r.synth_runtime_s;
    r.config_hash = hash;
  }

  const std::string csv = FormatCsv(*table);
  const std::pair<const char*, std::string> artifacts[] = {
      {kModelFile, CheckpointToJson(*model, hash)},
      {kSyntheticFile, csv},
      {kProvenanceFile, ProvenanceJson(*synth, *model, kSyntheticFile, csv, hash)},
      {kReportFile, ReportsToJson(*reports)}};
  for (const auto& [name, bytes] : artifacts) {
    const std::string path = InDir(c.output_dir, name);
    if (auto s = WriteFile(path, bytes); !s.ok()) return Fail(err, kExitConfig, "output", s);
    out << path << "\n";
  }
  return kExitOk;
}

}  // namespace

std::string HelpText() {
  CLI::App app;
  Flags flags;
  ConfigureApp(app);
  BuildApp(app, flags);
  return app.help("", CLI::AppFormatMode::All);
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app;
  Flags f;
  ConfigureApp(app);
  const Commands c = BuildApp(app, f);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const bool top = app.get_subcommands().empty();
    out << (top ? app.help("", CLI::AppFormatMode::All)
                : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dpsynth: " << e.what() << "\n";
    if (argc <= 1) err << app.help();
    return kExitConfig;
  }
  if (app.got_subcommand(c.infer_schema)) return CmdInferSchema(f, out, err);
  if (app.got_subcommand(c.train)) return CmdTrain(f, out, err);
  if (app.got_subcommand(c.synth)) return CmdSynth(f, out, err);
  if (app.got_subcommand(c.eval)) return CmdEval(f, out, err);
  if (app.got_subcommand(c.bench)) return CmdBench(f, /*scaled=*/false, out, err);
  if (app.got_subcommand(c.scale)) return CmdBench(f, /*scaled=*/true, out, err);
  if (app.got_subcommand(c.accountant)) return CmdAccountant(f, out, err);
  return CmdPipeline(f, out, err);
}

}  // namespace dpsynth::cli
