#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwtm/rng.hpp"

namespace iwtm {

enum class ColumnKind : std::uint8_t { Numeric, Categorical };

// One typed column.  A column is numeric when every cell parses fully as
// a floating-point number and no schema hint overrides it; otherwise the
// raw strings are kept.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::vector<double> numeric;
  std::vector<std::string> text;

  std::size_t size() const noexcept {
    return kind == ColumnKind::Numeric ? numeric.size() : text.size();
  }
};

struct RawTable {
  std::vector<Column> columns;

  std::size_t num_rows() const noexcept {
    return columns.empty() ? 0 : columns.front().size();
  }
  std::size_t num_cols() const noexcept { return columns.size(); }

  std::optional<std::size_t> column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].name == name) return c;
    }
    return std::nullopt;
  }

  const Column& column(const std::string& name) const {
    const auto idx = column_index(name);
    if (!idx) {
      throw std::invalid_argument("table has no column named '" + name + "'");
    }
    return columns[*idx];
  }

  RawTable subset(std::span<const std::size_t> rows) const {
    RawTable out;
    out.columns.reserve(columns.size());
    for (const Column& source : columns) {
      Column copy;
      copy.name = source.name;
      copy.kind = source.kind;
      for (const std::size_t r : rows) {
        if (source.kind == ColumnKind::Numeric) {
          copy.numeric.push_back(source.numeric[r]);
        } else {
          copy.text.push_back(source.text[r]);
        }
      }
      out.columns.push_back(std::move(copy));
    }
    return out;
  }
};

struct CsvOptions {
  bool has_header = true;
  // Names for headerless files; must match the column count when given.
  std::vector<std::string> column_names;
  // Columns to keep as strings even if every cell parses as a number.
  std::vector<std::string> force_categorical;
  std::vector<std::string> missing_tokens = {"", "?", "NA"};
};

struct CsvLoadReport {
  std::size_t rows_loaded = 0;
  std::size_t rows_dropped_missing = 0;
};

namespace detail {

inline std::string trim(const std::string& text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r')) {
    --end;
  }
  return text.substr(begin, end - begin);
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line,
                                               const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
    ++i;
  }
  if (quoted) {
    throw std::runtime_error(where + ": unterminated quoted field");
  }
  fields.push_back(trim(field));
  return fields;
}

inline bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

}  // namespace detail

// Loads a CSV file into a typed table.  Rows containing a missing-value
// token are dropped (and counted); the survivors decide each column's
// type.  Structural problems name the offending line.
inline RawTable load_csv(const std::string& path, const CsvOptions& options = {},
                         CsvLoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open CSV file '" + path + "'");
  }

  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_number = 0;
  std::size_t width = 0;
  std::size_t dropped = 0;

  const auto is_missing = [&](const std::string& cell) {
    return std::find(options.missing_tokens.begin(),
                     options.missing_tokens.end(),
                     cell) != options.missing_tokens.end();
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(line_number);
    std::vector<std::string> fields = detail::split_csv_line(line, where);

    if (names.empty() && width == 0) {
      width = fields.size();
      if (options.has_header) {
        names = fields;
        if (!options.column_names.empty()) {
          if (options.column_names.size() != width) {
            throw std::runtime_error(
                path + ": " + std::to_string(options.column_names.size()) +
                " column names given for " + std::to_string(width) +
                " columns");
          }
          names = options.column_names;
        }
        continue;
      }
      if (!options.column_names.empty()) {
        if (options.column_names.size() != width) {
          throw std::runtime_error(
              path + ": " + std::to_string(options.column_names.size()) +
              " column names given for " + std::to_string(width) + " columns");
        }
        names = options.column_names;
      } else {
        for (std::size_t c = 0; c < width; ++c) {
          names.push_back("c" + std::to_string(c));
        }
      }
    }
    if (fields.size() != width) {
      throw std::runtime_error(where + ": expected " + std::to_string(width) +
                               " fields, got " +
                               std::to_string(fields.size()));
    }
    bool missing = false;
    for (const std::string& cell : fields) {
      if (is_missing(cell)) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(fields));
  }

  if (names.empty()) {
    throw std::runtime_error(path + ": file is empty");
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows (after dropping " +
                             std::to_string(dropped) +
                             " rows with missing values)");
  }
  {
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size()) {
      throw std::runtime_error(path + ": duplicate column names");
    }
  }

  RawTable table;
  table.columns.resize(width);
  for (std::size_t c = 0; c < width; ++c) {
    Column& column = table.columns[c];
    column.name = names[c];
    const bool forced =
        std::find(options.force_categorical.begin(),
                  options.force_categorical.end(),
                  column.name) != options.force_categorical.end();
    bool numeric = !forced;
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
      double value = 0.0;
      if (!numeric || !detail::parse_number(row[c], value)) {
        numeric = false;
        break;
      }
      values.push_back(value);
    }
    if (numeric) {
      column.kind = ColumnKind::Numeric;
      column.numeric = std::move(values);
    } else {
      column.kind = ColumnKind::Categorical;
      column.text.reserve(rows.size());
      for (const auto& row : rows) column.text.push_back(row[c]);
    }
  }

  if (report) {
    report->rows_loaded = rows.size();
    report->rows_dropped_missing = dropped;
  }
  return table;
}

// Removes rows whose cell in `column_name` matches any of `values`
// (string comparison for categorical columns, numeric for numeric ones).
inline RawTable remove_rows_matching(const RawTable& table,
                                     const std::string& column_name,
                                     const std::vector<std::string>& values) {
  const Column& column = table.column(column_name);
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    bool matches = false;
    for (const std::string& value : values) {
      if (column.kind == ColumnKind::Categorical) {
        matches = column.text[r] == value;
      } else {
        double parsed = 0.0;
        if (detail::parse_number(value, parsed)) {
          matches = column.numeric[r] == parsed;
        }
      }
      if (matches) break;
    }
    if (!matches) keep.push_back(r);
  }
  return table.subset(keep);
}

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Uniform partition without replacement.  The train side takes
// round(fraction * n) rows; both sides must end up non-empty.
inline SplitIndices split_indices(std::size_t n, double train_fraction,
                                  RandomStream& rng) {
  if (n < 2) {
    throw std::invalid_argument("split: need at least 2 rows, got " +
                                std::to_string(n));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: train fraction must lie in (0, 1)");
  }
  const auto train_size = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (train_size == 0) {
    throw std::invalid_argument("split: train side would be empty");
  }
  if (train_size >= n) {
    throw std::invalid_argument("split: test side would be empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + train_size);
  split.test.assign(order.begin() + train_size, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

inline std::pair<RawTable, RawTable> split(const RawTable& table,
                                           double train_fraction,
                                           RandomStream& rng) {
  const SplitIndices indices =
      split_indices(table.num_rows(), train_fraction, rng);
  return {table.subset(indices.train), table.subset(indices.test)};
}

}  // namespace iwtm
