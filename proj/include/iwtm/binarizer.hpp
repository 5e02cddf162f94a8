#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iwtm/table.hpp"

namespace iwtm {

// Cumulative thermometer code for one source feature: bit i of the
// feature's block answers "value <= thresholds[i]".  Categorical columns
// are first mapped to their lexicographic rank, so thresholds live in
// code space and threshold_labels keep the human-readable form.
struct ThresholdSpec {
  std::size_t feature_index = 0;
  std::string feature_name;
  std::vector<double> thresholds;            // strictly ascending
  std::vector<std::string> threshold_labels;  // display form per threshold
  bool constant = false;  // source column had a single distinct value
};

namespace detail {

inline std::string format_number(double value) {
  std::ostringstream out;
  out << value;  // default precision keeps integer codes as integers
  return out.str();
}

}  // namespace detail

// Sorted distinct values, thinned to evenly spaced order statistics when
// there are more than max_thresholds of them.
inline ThresholdSpec fit_thresholds(std::span<const double> column,
                                    std::size_t max_thresholds) {
  if (column.empty()) {
    throw std::invalid_argument("fit_thresholds: column is empty");
  }
  if (max_thresholds < 1) {
    throw std::invalid_argument("fit_thresholds: max_thresholds must be >= 1");
  }
  std::vector<double> distinct(column.begin(), column.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  ThresholdSpec spec;
  spec.constant = distinct.size() == 1;
  if (distinct.size() <= max_thresholds) {
    spec.thresholds = std::move(distinct);
  } else {
    // k-th of max thresholds sits at the k/(max+1) order statistic.
    const std::size_t d = distinct.size();
    spec.thresholds.reserve(max_thresholds);
    for (std::size_t k = 1; k <= max_thresholds; ++k) {
      const auto idx = static_cast<std::size_t>(
          std::ceil(static_cast<double>(k * d) /
                    static_cast<double>(max_thresholds + 1))) -
          1;
      spec.thresholds.push_back(distinct[idx]);
    }
    spec.thresholds.erase(
        std::unique(spec.thresholds.begin(), spec.thresholds.end()),
        spec.thresholds.end());
  }
  spec.threshold_labels.reserve(spec.thresholds.size());
  for (const double t : spec.thresholds) {
    spec.threshold_labels.push_back(detail::format_number(t));
  }
  return spec;
}

// Thermometer bits for one value: 0...0 then 1...1, switching at the
// first threshold the value does not exceed.  Values above every
// threshold give all zeros.
inline std::vector<std::uint8_t> transform_value(double value,
                                                 const ThresholdSpec& spec) {
  std::vector<std::uint8_t> bits(spec.thresholds.size(), 0);
  for (std::size_t i = 0; i < spec.thresholds.size(); ++i) {
    if (value <= spec.thresholds[i]) {
      std::fill(bits.begin() + static_cast<std::ptrdiff_t>(i), bits.end(), 1);
      break;
    }
  }
  return bits;
}

struct LabelRule {
  enum class Mode {
    Lexicographic,  // two distinct raw values; the larger maps to 1
    PositiveValue,  // named raw value maps to 1, everything else to 0
    NumericGeq,     // numeric label: value >= threshold maps to 1
  };
  Mode mode = Mode::Lexicographic;
  std::string positive_value;
  double geq_threshold = 0.0;
};

struct BinarizedDataset {
  std::size_t num_features = 0;  // o, total bits per row
  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<int> labels;
  std::vector<ThresholdSpec> specs;
  // 2o names: the o plain bit names, then their negations.
  std::vector<std::string> literal_names;
};

// Fit on one table (normally the training split), transform any table
// with the same schema.  Fitting decides thresholds, category codes, and
// the label encoding; transforming never updates them, so unseen
// categories simply fall above every threshold and yield zero bits.
class Binarizer {
 public:
  static Binarizer fit(const RawTable& table, const std::string& label_column,
                       std::size_t max_thresholds,
                       const LabelRule& rule = {}) {
    Binarizer binarizer;
    binarizer.label_column_ = label_column;
    binarizer.rule_ = rule;
    const auto label_idx = table.column_index(label_column);
    if (!label_idx) {
      throw std::invalid_argument("binarize: table has no label column '" +
                                  label_column + "'");
    }
    if (table.num_rows() == 0) {
      throw std::invalid_argument("binarize: table has no rows");
    }

    std::size_t feature_index = 0;
    for (std::size_t c = 0; c < table.num_cols(); ++c) {
      if (c == *label_idx) continue;
      const Column& column = table.columns[c];
      Feature feature;
      feature.name = column.name;
      feature.kind = column.kind;
      if (column.kind == ColumnKind::Numeric) {
        feature.spec = fit_thresholds(column.numeric, max_thresholds);
      } else {
        std::set<std::string> distinct(column.text.begin(), column.text.end());
        std::size_t code = 0;
        for (const std::string& category : distinct) {
          feature.codes[category] = static_cast<double>(code++);
        }
        std::vector<double> coded;
        coded.reserve(column.text.size());
        for (const std::string& cell : column.text) {
          coded.push_back(feature.codes.at(cell));
        }
        feature.spec = fit_thresholds(coded, max_thresholds);
        // Replace numeric code labels with the category names they stand
        // for, so literals read "Competitiveness<=Negative" not "<=1".
        std::vector<std::string> by_code(distinct.begin(), distinct.end());
        for (std::size_t i = 0; i < feature.spec.thresholds.size(); ++i) {
          const auto code_value =
              static_cast<std::size_t>(feature.spec.thresholds[i]);
          feature.spec.threshold_labels[i] = by_code[code_value];
        }
      }
      feature.spec.feature_index = feature_index++;
      feature.spec.feature_name = column.name;
      if (feature.spec.constant) {
        binarizer.warnings_.push_back(
            "column '" + column.name +
            "' is constant; it contributes a single always-true bit");
      }
      binarizer.features_.push_back(std::move(feature));
    }
    if (binarizer.features_.empty()) {
      throw std::invalid_argument(
          "binarize: table has no feature columns besides the label");
    }
    binarizer.fit_label_rule(table.columns[*label_idx]);
    binarizer.build_literal_names();
    return binarizer;
  }

  BinarizedDataset transform(const RawTable& table) const {
    const std::size_t n = table.num_rows();
    BinarizedDataset dataset;
    dataset.num_features = num_bits();
    dataset.literal_names = literal_names_;
    for (const Feature& feature : features_) dataset.specs.push_back(feature.spec);
    dataset.rows.assign(n, {});

    std::vector<const Column*> resolved;
    resolved.reserve(features_.size());
    for (const Feature& feature : features_) {
      const auto idx = table.column_index(feature.name);
      if (!idx) {
        throw std::runtime_error(
            "binarize: table is missing fitted feature column '" +
            feature.name + "'");
      }
      const Column& column = table.columns[*idx];
      if (column.kind != feature.kind) {
        throw std::runtime_error("binarize: column '" + feature.name +
                                 "' changed type between fit and transform");
      }
      resolved.push_back(&column);
    }

    for (std::size_t r = 0; r < n; ++r) {
      std::vector<std::uint8_t>& row = dataset.rows[r];
      row.reserve(dataset.num_features);
      for (std::size_t f = 0; f < features_.size(); ++f) {
        const Feature& feature = features_[f];
        const Column& column = *resolved[f];
        double value = 0.0;
        if (feature.kind == ColumnKind::Numeric) {
          value = column.numeric[r];
        } else {
          const auto code = feature.codes.find(column.text[r]);
          // Unseen category: no threshold can claim it.
          value = code == feature.codes.end()
                      ? static_cast<double>(feature.codes.size())
                      : code->second;
        }
        const std::vector<std::uint8_t> bits = transform_value(value, feature.spec);
        row.insert(row.end(), bits.begin(), bits.end());
      }
    }
    dataset.labels = encode_labels(table);
    return dataset;
  }

  std::size_t num_bits() const noexcept {
    std::size_t total = 0;
    for (const Feature& feature : features_) {
      total += feature.spec.thresholds.size();
    }
    return total;
  }

  const std::vector<std::string>& literal_names() const noexcept {
    return literal_names_;
  }
  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }
  const std::string& label_column() const noexcept { return label_column_; }
  const LabelRule& rule() const noexcept { return rule_; }

  // Raw label values as resolved at fit time (lexicographic mode only).
  const std::string& positive_label() const noexcept { return positive_label_; }
  const std::string& negative_label() const noexcept { return negative_label_; }

  nlohmann::json to_json() const {
    nlohmann::json doc;
    doc["format"] = "iwtm-binarizer";
    doc["version"] = 1;
    nlohmann::json label;
    label["column"] = label_column_;
    switch (rule_.mode) {
      case LabelRule::Mode::Lexicographic:
        label["mode"] = "lexicographic";
        label["positive"] = positive_label_;
        label["negative"] = negative_label_;
        break;
      case LabelRule::Mode::PositiveValue:
        label["mode"] = "positive-value";
        label["positive"] = rule_.positive_value;
        break;
      case LabelRule::Mode::NumericGeq:
        label["mode"] = "numeric-geq";
        label["threshold"] = rule_.geq_threshold;
        break;
    }
    doc["label"] = std::move(label);
    nlohmann::json features = nlohmann::json::array();
    for (const Feature& feature : features_) {
      nlohmann::json entry;
      entry["name"] = feature.name;
      entry["kind"] =
          feature.kind == ColumnKind::Numeric ? "numeric" : "categorical";
      entry["thresholds"] = feature.spec.thresholds;
      entry["threshold_labels"] = feature.spec.threshold_labels;
      entry["constant"] = feature.spec.constant;
      if (feature.kind == ColumnKind::Categorical) {
        std::vector<std::string> categories(feature.codes.size());
        for (const auto& [category, code] : feature.codes) {
          categories[static_cast<std::size_t>(code)] = category;
        }
        entry["categories"] = categories;
      }
      features.push_back(std::move(entry));
    }
    doc["features"] = std::move(features);
    doc["literal_names"] = literal_names_;
    return doc;
  }

  static Binarizer from_json(const nlohmann::json& doc) {
    const auto get = [](const nlohmann::json& node,
                        const char* key) -> const nlohmann::json& {
      const auto it = node.find(key);
      if (it == node.end()) {
        throw std::runtime_error(
            std::string("binarizer document: missing field '") + key + "'");
      }
      return *it;
    };
    if (get(doc, "format").get<std::string>() != "iwtm-binarizer") {
      throw std::runtime_error("not an iwtm-binarizer document");
    }
    if (get(doc, "version").get<int>() != 1) {
      throw std::runtime_error("unsupported iwtm-binarizer version");
    }
    Binarizer binarizer;
    const nlohmann::json& label = get(doc, "label");
    binarizer.label_column_ = get(label, "column").get<std::string>();
    const std::string mode = get(label, "mode").get<std::string>();
    if (mode == "lexicographic") {
      binarizer.rule_.mode = LabelRule::Mode::Lexicographic;
      binarizer.positive_label_ = get(label, "positive").get<std::string>();
      binarizer.negative_label_ = get(label, "negative").get<std::string>();
    } else if (mode == "positive-value") {
      binarizer.rule_.mode = LabelRule::Mode::PositiveValue;
      binarizer.rule_.positive_value = get(label, "positive").get<std::string>();
    } else if (mode == "numeric-geq") {
      binarizer.rule_.mode = LabelRule::Mode::NumericGeq;
      binarizer.rule_.geq_threshold = get(label, "threshold").get<double>();
    } else {
      throw std::runtime_error("binarizer document: unknown label mode '" +
                               mode + "'");
    }
    std::size_t feature_index = 0;
    for (const nlohmann::json& entry : get(doc, "features")) {
      Feature feature;
      feature.name = get(entry, "name").get<std::string>();
      const std::string kind = get(entry, "kind").get<std::string>();
      feature.kind =
          kind == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
      feature.spec.feature_index = feature_index++;
      feature.spec.feature_name = feature.name;
      feature.spec.thresholds = get(entry, "thresholds").get<std::vector<double>>();
      feature.spec.threshold_labels =
          get(entry, "threshold_labels").get<std::vector<std::string>>();
      feature.spec.constant = get(entry, "constant").get<bool>();
      if (feature.kind == ColumnKind::Categorical) {
        const auto categories =
            get(entry, "categories").get<std::vector<std::string>>();
        for (std::size_t code = 0; code < categories.size(); ++code) {
          feature.codes[categories[code]] = static_cast<double>(code);
        }
      }
      binarizer.features_.push_back(std::move(feature));
    }
    binarizer.literal_names_ =
        get(doc, "literal_names").get<std::vector<std::string>>();
    return binarizer;
  }

 private:
  struct Feature {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::map<std::string, double> codes;  // categorical value -> rank
    ThresholdSpec spec;
  };

  void fit_label_rule(const Column& column) {
    switch (rule_.mode) {
      case LabelRule::Mode::Lexicographic: {
        if (column.kind == ColumnKind::Categorical) {
          const std::set<std::string> distinct(column.text.begin(),
                                               column.text.end());
          if (distinct.size() != 2) {
            throw std::invalid_argument(
                "binarize: label column '" + label_column_ + "' has " +
                std::to_string(distinct.size()) +
                " distinct values; need exactly 2 (use a positive-value, "
                "threshold, or drop rule to reduce it)");
          }
          negative_label_ = *distinct.begin();
          positive_label_ = *std::next(distinct.begin());
        } else {
          const std::set<double> distinct(column.numeric.begin(),
                                          column.numeric.end());
          if (distinct.size() != 2) {
            throw std::invalid_argument(
                "binarize: label column '" + label_column_ + "' has " +
                std::to_string(distinct.size()) +
                " distinct values; need exactly 2 (use a positive-value, "
                "threshold, or drop rule to reduce it)");
          }
          negative_label_ = detail::format_number(*distinct.begin());
          positive_label_ = detail::format_number(*std::next(distinct.begin()));
        }
        break;
      }
      case LabelRule::Mode::PositiveValue: {
        positive_label_ = rule_.positive_value;
        break;
      }
      case LabelRule::Mode::NumericGeq: {
        if (column.kind != ColumnKind::Numeric) {
          throw std::invalid_argument(
              "binarize: label column '" + label_column_ +
              "' is not numeric; a >= threshold rule cannot apply");
        }
        break;
      }
    }
  }

  std::vector<int> encode_labels(const RawTable& table) const {
    const auto idx = table.column_index(label_column_);
    if (!idx) {
      throw std::runtime_error("binarize: table has no label column '" +
                               label_column_ + "'");
    }
    const Column& column = table.columns[*idx];
    std::vector<int> labels;
    labels.reserve(table.num_rows());
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      const std::string cell = column.kind == ColumnKind::Categorical
                                   ? column.text[r]
                                   : detail::format_number(column.numeric[r]);
      switch (rule_.mode) {
        case LabelRule::Mode::Lexicographic:
          if (cell == positive_label_) {
            labels.push_back(1);
          } else if (cell == negative_label_) {
            labels.push_back(0);
          } else {
            throw std::runtime_error(
                "binarize: row " + std::to_string(r) + " has label '" + cell +
                "', which the fitted encoding (positive '" + positive_label_ +
                "', negative '" + negative_label_ + "') cannot map");
          }
          break;
        case LabelRule::Mode::PositiveValue:
          labels.push_back(cell == positive_label_ ? 1 : 0);
          break;
        case LabelRule::Mode::NumericGeq:
          if (column.kind != ColumnKind::Numeric) {
            throw std::runtime_error(
                "binarize: label column '" + label_column_ +
                "' is not numeric; a >= threshold rule cannot apply");
          }
          labels.push_back(column.numeric[r] >= rule_.geq_threshold ? 1 : 0);
          break;
      }
    }
    return labels;
  }

  void build_literal_names() {
    literal_names_.clear();
    for (const Feature& feature : features_) {
      for (const std::string& label : feature.spec.threshold_labels) {
        literal_names_.push_back(feature.name + "<=" + label);
      }
    }
    const std::size_t o = literal_names_.size();
    for (std::size_t k = 0; k < o; ++k) {
      literal_names_.push_back("¬(" + literal_names_[k] + ")");
    }
  }

  std::vector<Feature> features_;
  std::vector<std::string> literal_names_;
  std::vector<std::string> warnings_;
  std::string label_column_;
  std::string positive_label_;
  std::string negative_label_;
  LabelRule rule_;
};

// One-shot helper: fit and transform the same table.
inline BinarizedDataset binarize(const RawTable& table,
                                 const std::string& label_column,
                                 std::size_t max_thresholds,
                                 const LabelRule& rule = {},
                                 Binarizer* fitted = nullptr) {
  Binarizer binarizer = Binarizer::fit(table, label_column, max_thresholds, rule);
  BinarizedDataset dataset = binarizer.transform(table);
  if (fitted) *fitted = std::move(binarizer);
  return dataset;
}

// Versioned on-disk form of a binarized dataset.  Threshold specs live in
// the binarizer sidecar, not here; the literal names are enough for
// training and rule export.
inline nlohmann::json dataset_to_json(const BinarizedDataset& dataset) {
  nlohmann::json doc;
  doc["format"] = "iwtm-dataset";
  doc["version"] = 1;
  doc["num_features"] = dataset.num_features;
  doc["literal_names"] = dataset.literal_names;
  doc["labels"] = dataset.labels;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : dataset.rows) {
    rows.push_back(row);
  }
  doc["rows"] = std::move(rows);
  return doc;
}

inline BinarizedDataset dataset_from_json(const nlohmann::json& doc) {
  const auto get = [](const nlohmann::json& node,
                      const char* key) -> const nlohmann::json& {
    const auto it = node.find(key);
    if (it == node.end()) {
      throw std::runtime_error(
          std::string("dataset document: missing field '") + key + "'");
    }
    return *it;
  };
  if (get(doc, "format").get<std::string>() != "iwtm-dataset") {
    throw std::runtime_error("not an iwtm-dataset document");
  }
  if (get(doc, "version").get<int>() != 1) {
    throw std::runtime_error("unsupported iwtm-dataset version");
  }
  BinarizedDataset dataset;
  dataset.num_features = get(doc, "num_features").get<std::size_t>();
  dataset.literal_names =
      get(doc, "literal_names").get<std::vector<std::string>>();
  if (dataset.literal_names.size() != 2 * dataset.num_features) {
    throw std::runtime_error("dataset document: expected " +
                             std::to_string(2 * dataset.num_features) +
                             " literal names, got " +
                             std::to_string(dataset.literal_names.size()));
  }
  dataset.labels = get(doc, "labels").get<std::vector<int>>();
  for (const nlohmann::json& row : get(doc, "rows")) {
    std::vector<std::uint8_t> bits = row.get<std::vector<std::uint8_t>>();
    if (bits.size() != dataset.num_features) {
      throw std::runtime_error(
          "dataset document: row " + std::to_string(dataset.rows.size()) +
          " has " + std::to_string(bits.size()) + " bits, expected " +
          std::to_string(dataset.num_features));
    }
    for (const std::uint8_t bit : bits) {
      if (bit > 1) {
        throw std::runtime_error("dataset document: row " +
                                 std::to_string(dataset.rows.size()) +
                                 " contains a non-binary value");
      }
    }
    dataset.rows.push_back(std::move(bits));
  }
  if (dataset.labels.size() != dataset.rows.size()) {
    throw std::runtime_error("dataset document: " +
                             std::to_string(dataset.rows.size()) +
                             " rows but " +
                             std::to_string(dataset.labels.size()) +
                             " labels");
  }
  for (const int label : dataset.labels) {
    if (label != 0 && label != 1) {
      throw std::runtime_error("dataset document: labels must be 0 or 1");
    }
  }
  return dataset;
}

}  // namespace iwtm
