#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "iwtm/binarizer.hpp"
#include "iwtm/machine.hpp"
#include "iwtm/metrics.hpp"
#include "iwtm/rng.hpp"
#include "iwtm/rules.hpp"
#include "iwtm/serialize.hpp"
#include "iwtm/table.hpp"

namespace iwtm {

// Everything one experiment needs: raw data plus how to binarize and
// learn it.  machine.seed acts as the master seed for the whole run.
struct TrialRecipe {
  RawTable table;
  std::string label_column;
  LabelRule label_rule{};
  std::size_t max_thresholds = 64;
  MachineConfig machine{};
  double train_fraction = 0.8;
};

struct TrialResult {
  std::uint64_t seed = 0;  // machine seed this trial trained under
  Metrics metrics{};       // held-out test metrics
  double train_accuracy = 0.0;
  std::size_t literal_count = 0;

  bool operator==(const TrialResult&) const = default;
};

struct TrialReport {
  std::vector<TrialResult> trials;
  Metrics mean{};  // arithmetic mean per metric; degenerate flags OR-ed
  double mean_train_accuracy = 0.0;
  double mean_literals = 0.0;

  std::uint64_t rounded_mean_literals() const {
    return static_cast<std::uint64_t>(std::llround(mean_literals));
  }

  bool operator==(const TrialReport&) const = default;
};

// Each trial re-splits the raw table, refits the binarizer on its train
// half only, and trains a fresh machine — three independent streams all
// derived from the master seed and the trial index.
inline TrialResult run_single_trial(const TrialRecipe& recipe,
                                    std::uint64_t trial_index) {
  const RandomStream master(recipe.machine.seed);
  RandomStream trial_stream(master.derive_seed(trial_index));
  RandomStream split_rng = trial_stream.derive(1);

  const auto [train_table, test_table] =
      split(recipe.table, recipe.train_fraction, split_rng);
  const Binarizer binarizer =
      Binarizer::fit(train_table, recipe.label_column, recipe.max_thresholds,
                     recipe.label_rule);
  const BinarizedDataset train = binarizer.transform(train_table);
  const BinarizedDataset test = binarizer.transform(test_table);

  MachineConfig config = recipe.machine;
  config.seed = trial_stream.derive_seed(2);
  Machine machine(config, train.num_features);
  machine.fit(train.rows, train.labels);

  TrialResult result;
  result.seed = config.seed;
  result.metrics = compute_metrics(ConfusionCounts::from_predictions(
      test.labels, machine.predict_batch(test.rows)));
  const std::vector<int> train_predictions = machine.predict_batch(train.rows);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train_predictions.size(); ++i) {
    if (train_predictions[i] == train.labels[i]) ++correct;
  }
  result.train_accuracy =
      static_cast<double>(correct) / static_cast<double>(train.rows.size());
  result.literal_count = count_literals(machine);
  return result;
}

namespace detail {

inline void aggregate_report(TrialReport& report) {
  const double n = static_cast<double>(report.trials.size());
  for (const TrialResult& trial : report.trials) {
    report.mean.precision += trial.metrics.precision / n;
    report.mean.recall += trial.metrics.recall / n;
    report.mean.f1 += trial.metrics.f1 / n;
    report.mean.accuracy += trial.metrics.accuracy / n;
    report.mean.specificity += trial.metrics.specificity / n;
    report.mean.precision_degenerate |= trial.metrics.precision_degenerate;
    report.mean.recall_degenerate |= trial.metrics.recall_degenerate;
    report.mean.f1_degenerate |= trial.metrics.f1_degenerate;
    report.mean.specificity_degenerate |= trial.metrics.specificity_degenerate;
    report.mean_train_accuracy += trial.train_accuracy / n;
    report.mean_literals += static_cast<double>(trial.literal_count) / n;
  }
}

}  // namespace detail

// Worker-pool runner.  Trial outputs land in per-index slots, so the
// report is identical no matter how many jobs execute it.
inline TrialReport run_trials(const TrialRecipe& recipe, std::size_t trials,
                              std::size_t jobs = 1) {
  if (trials < 1) {
    throw std::invalid_argument("run_trials: trials must be at least 1");
  }
  if (jobs < 1) {
    throw std::invalid_argument("run_trials: jobs must be at least 1");
  }
  recipe.machine.validate();

  TrialReport report;
  report.trials.resize(trials);
  std::vector<std::exception_ptr> failures(trials);

  const std::size_t workers = jobs < trials ? jobs : trials;
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) {
      report.trials[t] = run_single_trial(recipe, t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t t = next.fetch_add(1); t < trials;
             t = next.fetch_add(1)) {
          try {
            report.trials[t] = run_single_trial(recipe, t);
          } catch (...) {
            failures[t] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& worker : pool) worker.join();
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  detail::aggregate_report(report);
  return report;
}

inline nlohmann::json report_to_json(const TrialReport& report) {
  nlohmann::json doc;
  doc["format"] = "iwtm-trials";
  doc["version"] = 1;
  doc["trials"] = nlohmann::json::array();
  for (const TrialResult& trial : report.trials) {
    doc["trials"].push_back({{"seed", trial.seed},
                             {"precision", trial.metrics.precision},
                             {"recall", trial.metrics.recall},
                             {"f1", trial.metrics.f1},
                             {"accuracy", trial.metrics.accuracy},
                             {"specificity", trial.metrics.specificity},
                             {"train_accuracy", trial.train_accuracy},
                             {"literal_count", trial.literal_count}});
  }
  doc["mean"] = {{"precision", report.mean.precision},
                 {"recall", report.mean.recall},
                 {"f1", report.mean.f1},
                 {"accuracy", report.mean.accuracy},
                 {"specificity", report.mean.specificity},
                 {"train_accuracy", report.mean_train_accuracy},
                 {"literals", report.mean_literals},
                 {"literals_rounded", report.rounded_mean_literals()},
                 {"any_degenerate", report.mean.precision_degenerate ||
                                        report.mean.recall_degenerate ||
                                        report.mean.f1_degenerate ||
                                        report.mean.specificity_degenerate}};
  return doc;
}

// One sweep point: both machine variants at the same clause budget.
struct BenchmarkColumn {
  std::uint32_t num_clauses = 0;
  TrialReport tm;    // weighting = none
  TrialReport iwtm;  // weighting = integer
};

namespace detail {

inline std::string fixed3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  return out.str();
}

}  // namespace detail

// Plain-text table: one column per clause budget, paired TM/IWTM rows
// per measure, literal counts as rounded means.
inline std::string render_benchmark_table(
    std::span<const BenchmarkColumn> columns) {
  if (columns.empty()) {
    throw std::invalid_argument("render_benchmark_table: no columns");
  }
  const std::vector<std::string> measures{"F1-Score", "Accuracy", "Precision",
                                          "Recall", "Specificity"};
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"measure", "model"};
  for (const BenchmarkColumn& column : columns) {
    header.push_back("m=" + std::to_string(column.num_clauses));
  }
  grid.push_back(header);
  for (std::size_t row = 0; row < measures.size(); ++row) {
    std::vector<std::string> tm_row{measures[row], "TM"};
    std::vector<std::string> iwtm_row{"", "IWTM"};
    for (const BenchmarkColumn& column : columns) {
      const auto pick = [row](const Metrics& m) {
        switch (row) {
          case 0: return m.f1;
          case 1: return m.accuracy;
          case 2: return m.precision;
          case 3: return m.recall;
          default: return m.specificity;
        }
      };
      tm_row.push_back(detail::fixed3(pick(column.tm.mean)));
      iwtm_row.push_back(detail::fixed3(pick(column.iwtm.mean)));
    }
    grid.push_back(std::move(tm_row));
    grid.push_back(std::move(iwtm_row));
  }
  std::vector<std::string> tm_lit{"No. of Lit.", "TM"};
  std::vector<std::string> iwtm_lit{"", "IWTM"};
  for (const BenchmarkColumn& column : columns) {
    tm_lit.push_back(std::to_string(column.tm.rounded_mean_literals()));
    iwtm_lit.push_back(std::to_string(column.iwtm.rounded_mean_literals()));
  }
  grid.push_back(std::move(tm_lit));
  grid.push_back(std::move(iwtm_lit));

  std::vector<std::size_t> widths(grid[0].size(), 0);
  for (const std::vector<std::string>& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].size() > widths[c]) widths[c] = row[c].size();
    }
  }
  std::ostringstream out;
  for (const std::vector<std::string>& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      out << std::left << std::setw(static_cast<int>(widths[c])) << row[c];
    }
    out << '\n';
  }
  out << "No. of Lit. = total included literals per machine (weight-0 "
         "clauses excluded under integer weighting), mean over trials, "
         "rounded to nearest integer.\n";
  return out.str();
}

inline nlohmann::json benchmark_to_json(
    std::span<const BenchmarkColumn> columns) {
  nlohmann::json doc;
  doc["format"] = "iwtm-benchmark";
  doc["version"] = 1;
  doc["sweep"] = nlohmann::json::array();
  for (const BenchmarkColumn& column : columns) {
    doc["sweep"].push_back({{"num_clauses", column.num_clauses},
                            {"tm", report_to_json(column.tm)},
                            {"iwtm", report_to_json(column.iwtm)}});
  }
  return doc;
}

}  // namespace iwtm
