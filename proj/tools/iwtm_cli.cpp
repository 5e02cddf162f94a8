// iwtm — Tsetlin machine workbench: binarize CSV data, train vanilla or
// integer-weighted machines, benchmark clause budgets, export rules.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "iwtm/binarizer.hpp"
#include "iwtm/machine.hpp"
#include "iwtm/metrics.hpp"
#include "iwtm/rng.hpp"
#include "iwtm/rules.hpp"
#include "iwtm/serialize.hpp"
#include "iwtm/table.hpp"
#include "iwtm/trials.hpp"

namespace {

// Flags shared by every command that starts from a raw CSV.
struct DataFlags {
  std::string csv;
  std::string label;
  bool no_header = false;
  std::vector<std::string> columns;
  std::vector<std::string> categorical;
  std::vector<std::string> drop_columns;
  std::vector<std::string> drop_label_values;
  std::string positive_label;
  double label_geq = 0.0;
  std::size_t max_thresholds = 64;
  CLI::Option* label_geq_opt = nullptr;

  iwtm::LabelRule rule() const {
    iwtm::LabelRule rule;
    if (!positive_label.empty()) {
      rule.mode = iwtm::LabelRule::Mode::PositiveValue;
      rule.positive_value = positive_label;
    } else if (label_geq_opt != nullptr && label_geq_opt->count() > 0) {
      rule.mode = iwtm::LabelRule::Mode::NumericGeq;
      rule.geq_threshold = label_geq;
    }
    return rule;
  }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("csv", flags.csv, "input CSV file")->required();
  cmd->add_option("--label", flags.label, "label column name")->required();
  cmd->add_flag("--no-header", flags.no_header,
                "CSV has no header row (name columns with --columns)");
  cmd->add_option("--columns", flags.columns,
                  "comma-separated column names for headerless files")
      ->delimiter(',');
  cmd->add_option("--categorical", flags.categorical,
                  "treat this column as categorical even if numeric "
                  "(repeatable)");
  cmd->add_option("--drop-column", flags.drop_columns,
                  "remove this column before binarization (repeatable)");
  cmd->add_option("--drop-label", flags.drop_label_values,
                  "drop rows whose label equals this value (repeatable)");
  CLI::Option* positive =
      cmd->add_option("--positive-label", flags.positive_label,
                      "label value mapped to class 1 (default: the "
                      "lexicographically larger of two values)");
  flags.label_geq_opt =
      cmd->add_option("--label-geq", flags.label_geq,
                      "numeric labels: class 1 iff label >= this threshold");
  positive->excludes(flags.label_geq_opt);
  flags.label_geq_opt->excludes(positive);
  cmd->add_option("--max-thresholds", flags.max_thresholds,
                  "cap on thresholds per numeric feature")
      ->check(CLI::PositiveNumber);
}

iwtm::RawTable load_prepared_table(const DataFlags& flags) {
  iwtm::CsvOptions options;
  options.has_header = !flags.no_header;
  options.column_names = flags.columns;
  options.force_categorical = flags.categorical;
  iwtm::CsvLoadReport report;
  iwtm::RawTable table = iwtm::load_csv(flags.csv, options, &report);
  if (report.rows_dropped_missing > 0) {
    std::fprintf(stderr, "iwtm: dropped %zu rows with missing values\n",
                 report.rows_dropped_missing);
  }
  for (const std::string& name : flags.drop_columns) {
    const auto index = table.column_index(name);
    if (!index.has_value()) {
      throw std::invalid_argument("--drop-column: no column named '" + name +
                                  "'");
    }
    table.columns.erase(table.columns.begin() +
                        static_cast<std::ptrdiff_t>(*index));
  }
  if (!flags.drop_label_values.empty()) {
    table =
        iwtm::remove_rows_matching(table, flags.label, flags.drop_label_values);
  }
  return table;
}

struct MachineFlags {
  std::uint32_t clauses = 100;
  std::int64_t threshold = 15;
  double specificity = 3.0;
  std::uint32_t states = 100;
  std::uint32_t epochs = 100;
  std::string weighted = "none";
  std::uint64_t seed = 42;

  iwtm::MachineConfig config() const {
    iwtm::MachineConfig config;
    config.num_clauses = clauses;
    config.threshold = threshold;
    config.specificity = specificity;
    config.ta_half_states = states;
    config.epochs = epochs;
    config.weighting = iwtm::weighting_from_string(weighted);
    config.seed = seed;
    return config;
  }
};

void add_machine_flags(CLI::App* cmd, MachineFlags& flags) {
  cmd->add_option("-m,--clauses", flags.clauses,
                  "number of clauses (must be even)");
  cmd->add_option("-T,--threshold", flags.threshold,
                  "vote clamp threshold T");
  cmd->add_option("-s,--s", flags.specificity, "specificity s (>= 1)");
  cmd->add_option("-N,--states", flags.states,
                  "automaton states per action");
  cmd->add_option("--epochs", flags.epochs, "training epochs");
  cmd->add_option("--weighted", flags.weighted,
                  "clause weighting: none | integer")
      ->check(CLI::IsMember({"none", "integer"}));
  cmd->add_option("--seed", flags.seed, "master seed (env fallback)")
      ->envname("IWTM_SEED");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open file");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& error) {
    throw std::runtime_error(path + ": " + error.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open file for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

std::string strip_suffix(const std::string& text, const std::string& suffix) {
  if (text.size() >= suffix.size() &&
      text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return text.substr(0, text.size() - suffix.size());
  }
  return text;
}

std::string default_prefix(const std::string& csv_path) {
  const std::filesystem::path path(csv_path);
  return (path.parent_path() / path.stem()).string();
}

int cmd_binarize(const DataFlags& data, const std::string& out_prefix) {
  const iwtm::RawTable table = load_prepared_table(data);
  const iwtm::Binarizer binarizer =
      iwtm::Binarizer::fit(table, data.label, data.max_thresholds, data.rule());
  for (const std::string& warning : binarizer.warnings()) {
    std::fprintf(stderr, "iwtm: warning: %s\n", warning.c_str());
  }
  const iwtm::BinarizedDataset dataset = binarizer.transform(table);

  const std::string prefix =
      out_prefix.empty() ? default_prefix(data.csv) : out_prefix;
  const std::string dataset_path = prefix + ".dataset.json";
  const std::string sidecar_path = prefix + ".binarizer.json";
  write_text_file(dataset_path, iwtm::dataset_to_json(dataset).dump(2) + "\n");
  write_text_file(sidecar_path, binarizer.to_json().dump(2) + "\n");

  std::fprintf(stderr,
               "iwtm: binarized %zu rows into %zu binary features "
               "(class 1 = '%s', class 0 = '%s')\n",
               dataset.rows.size(), dataset.num_features,
               binarizer.positive_label().c_str(),
               binarizer.negative_label().c_str());
  std::fprintf(stderr, "iwtm: wrote %s and %s\n", dataset_path.c_str(),
               sidecar_path.c_str());
  return 0;
}

int cmd_train(const std::string& dataset_path, const MachineFlags& machine,
              double train_fraction, std::string out_path) {
  const iwtm::BinarizedDataset dataset =
      iwtm::dataset_from_json(read_json_file(dataset_path));

  iwtm::MachineConfig config = machine.config();
  config.validate();

  const iwtm::RandomStream master(config.seed);
  iwtm::RandomStream split_rng = master.derive(1);
  const iwtm::SplitIndices indices =
      iwtm::split_indices(dataset.rows.size(), train_fraction, split_rng);

  std::vector<std::vector<std::uint8_t>> train_rows, test_rows;
  std::vector<int> train_labels, test_labels;
  for (const std::size_t r : indices.train) {
    train_rows.push_back(dataset.rows[r]);
    train_labels.push_back(dataset.labels[r]);
  }
  for (const std::size_t r : indices.test) {
    test_rows.push_back(dataset.rows[r]);
    test_labels.push_back(dataset.labels[r]);
  }

  config.seed = master.derive_seed(2);
  iwtm::Machine model(config, dataset.num_features);
  std::fprintf(stderr, "iwtm: training on %zu rows (%zu held out), %u epochs\n",
               train_rows.size(), test_rows.size(), config.epochs);
  model.fit(train_rows, train_labels);

  if (out_path.empty()) {
    out_path = strip_suffix(strip_suffix(dataset_path, ".json"), ".dataset") +
               ".model.json";
  }
  iwtm::save_machine(model, out_path);

  const iwtm::Metrics test_metrics =
      iwtm::compute_metrics(iwtm::ConfusionCounts::from_predictions(
          test_labels, model.predict_batch(test_rows)));
  const std::vector<int> train_predictions = model.predict_batch(train_rows);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train_predictions.size(); ++i) {
    if (train_predictions[i] == train_labels[i]) ++correct;
  }

  nlohmann::json doc;
  doc["format"] = "iwtm-eval";
  doc["version"] = 1;
  doc["model"] = out_path;
  doc["train"] = {{"rows", train_rows.size()},
                  {"accuracy", static_cast<double>(correct) /
                                   static_cast<double>(train_rows.size())}};
  doc["test"] = {{"rows", test_rows.size()},
                 {"precision", test_metrics.precision},
                 {"recall", test_metrics.recall},
                 {"f1", test_metrics.f1},
                 {"accuracy", test_metrics.accuracy},
                 {"specificity", test_metrics.specificity}};
  doc["literal_count"] = iwtm::count_literals(model);
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int cmd_benchmark(const DataFlags& data, const MachineFlags& machine,
                  double train_fraction, std::size_t trials,
                  std::vector<std::uint32_t> sweep, std::size_t jobs,
                  const std::string& out_path) {
  iwtm::TrialRecipe recipe;
  recipe.table = load_prepared_table(data);
  recipe.label_column = data.label;
  recipe.label_rule = data.rule();
  recipe.max_thresholds = data.max_thresholds;
  recipe.train_fraction = train_fraction;
  recipe.machine = machine.config();

  std::vector<iwtm::BenchmarkColumn> columns;
  for (const std::uint32_t m : sweep) {
    iwtm::BenchmarkColumn column;
    column.num_clauses = m;
    for (const iwtm::Weighting weighting :
         {iwtm::Weighting::None, iwtm::Weighting::Integer}) {
      recipe.machine.num_clauses = m;
      recipe.machine.weighting = weighting;
      const auto started = std::chrono::steady_clock::now();
      iwtm::TrialReport report = iwtm::run_trials(recipe, trials, jobs);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      std::fprintf(stderr,
                   "iwtm: m=%-5u %-4s f1 %.3f  acc %.3f  literals %llu  "
                   "(%.1fs, %zu trials)\n",
                   m, weighting == iwtm::Weighting::None ? "TM" : "IWTM",
                   report.mean.f1, report.mean.accuracy,
                   static_cast<unsigned long long>(
                       report.rounded_mean_literals()),
                   elapsed, trials);
      if (weighting == iwtm::Weighting::None) {
        column.tm = std::move(report);
      } else {
        column.iwtm = std::move(report);
      }
    }
    columns.push_back(std::move(column));
  }

  std::cout << iwtm::render_benchmark_table(columns);
  if (!out_path.empty()) {
    write_text_file(out_path, iwtm::benchmark_to_json(columns).dump(2) + "\n");
    std::fprintf(stderr, "iwtm: wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_export_rules(const std::string& model_path,
                     const std::string& binarizer_path,
                     const std::string& dataset_path, bool include_dead,
                     const std::string& format, const std::string& out_path) {
  const iwtm::Machine model = iwtm::load_machine(model_path);
  std::vector<std::string> names;
  if (!binarizer_path.empty()) {
    names = iwtm::Binarizer::from_json(read_json_file(binarizer_path))
                .literal_names();
  } else {
    names = iwtm::dataset_from_json(read_json_file(dataset_path)).literal_names;
  }
  const iwtm::RuleSet rules = iwtm::extract_rules(model, names);

  std::string rendered;
  if (format == "json") {
    rendered = iwtm::rules_to_json(rules, include_dead).dump(2) + "\n";
  } else {
    rendered = iwtm::render_rules_text(rules, include_dead);
  }
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_text_file(out_path, rendered);
    std::fprintf(stderr, "iwtm: wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "iwtm — Tsetlin machine workbench: binarization, training, "
      "benchmarking, and rule export for vanilla and integer-weighted "
      "machines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "iwtm 1.0.0");

  DataFlags binarize_data;
  std::string binarize_out;
  CLI::App* binarize =
      app.add_subcommand("binarize", "turn a CSV into a binary dataset plus "
                                     "a reusable binarizer sidecar");
  add_data_flags(binarize, binarize_data);
  binarize->add_option("--out", binarize_out,
                       "output prefix (default: CSV path without extension)");

  std::string train_dataset;
  MachineFlags train_machine;
  double train_fraction = 0.8;
  std::string train_out;
  CLI::App* train = app.add_subcommand(
      "train", "train on a binarized dataset with a held-out split and "
               "write the model JSON");
  train->add_option("dataset", train_dataset,
                    "dataset JSON produced by 'binarize'")
      ->required();
  add_machine_flags(train, train_machine);
  train->add_option("--train-fraction", train_fraction,
                    "fraction of rows used for training");
  train->add_option("--out", train_out,
                    "model output path (default: <dataset>.model.json)");

  DataFlags bench_data;
  MachineFlags bench_machine;
  double bench_fraction = 0.8;
  std::size_t bench_trials = 50;
  std::vector<std::uint32_t> bench_sweep{2, 10, 100, 500, 2000, 8000};
  std::size_t bench_jobs = std::thread::hardware_concurrency() > 0
                               ? std::thread::hardware_concurrency()
                               : 1;
  std::string bench_out;
  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "sweep clause budgets, training vanilla and "
                   "integer-weighted machines over repeated random splits");
  add_data_flags(benchmark, bench_data);
  add_machine_flags(benchmark, bench_machine);
  benchmark->add_option("--train-fraction", bench_fraction,
                        "fraction of rows used for training");
  benchmark->add_option("--trials", bench_trials,
                        "independent trials per sweep point")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--sweep", bench_sweep,
                        "comma-separated clause counts to sweep")
      ->delimiter(',');
  benchmark->add_option("--jobs", bench_jobs, "worker threads for trials")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--out", bench_out, "also write results as JSON here");

  std::string export_model, export_binarizer, export_dataset, export_out;
  std::string export_format = "text";
  bool include_dead = false;
  CLI::App* export_rules = app.add_subcommand(
      "export-rules", "render a trained model as human-readable rules");
  export_rules->add_option("model", export_model, "model JSON file")
      ->required();
  CLI::Option* opt_binarizer = export_rules->add_option(
      "--binarizer", export_binarizer, "binarizer sidecar naming the literals");
  CLI::Option* opt_dataset = export_rules->add_option(
      "--dataset", export_dataset, "dataset JSON naming the literals");
  opt_binarizer->excludes(opt_dataset);
  opt_dataset->excludes(opt_binarizer);
  export_rules->add_flag("--include-dead", include_dead,
                         "also render weight-0 clauses");
  export_rules->add_option("--format", export_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));
  export_rules->add_option("--out", export_out,
                           "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(binarize)) {
      return cmd_binarize(binarize_data, binarize_out);
    }
    if (app.got_subcommand(train)) {
      return cmd_train(train_dataset, train_machine, train_fraction,
                       train_out);
    }
    if (app.got_subcommand(benchmark)) {
      return cmd_benchmark(bench_data, bench_machine, bench_fraction,
                           bench_trials, bench_sweep, bench_jobs, bench_out);
    }
    if (app.got_subcommand(export_rules)) {
      if (export_binarizer.empty() && export_dataset.empty()) {
        std::fprintf(stderr,
                     "iwtm: export-rules needs --binarizer or --dataset for "
                     "literal names\n");
        return 2;
      }
      return cmd_export_rules(export_model, export_binarizer, export_dataset,
                              include_dead, export_format, export_out);
    }
  } catch (const std::invalid_argument& error) {
    std::fprintf(stderr, "iwtm: %s\n", error.what());
    return 2;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "iwtm: %s\n", error.what());
    return 1;
  }
  return 0;
}
