#pragma once

#include "spafac/ca.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spafac {

// Comma-separated, UTF-8 text. Fields may be double-quoted; a doubled quote
// inside a quoted field is a literal quote. CRLF and a leading BOM are accepted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Position of a header name; ParseError when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

struct IngestOptions {
  bool drop_empty = false;                 // remove all-zero rows and columns instead of failing
  std::optional<std::string> group_column; // discriminant input: column holding the group label
  std::vector<std::string> variables;      // categorical input: columns to code (empty: all)
};

struct CountData {
  ContingencyTable table;
  std::vector<std::string> groups;  // one per row when a group column was given
  std::vector<std::string> dropped_rows;
  std::vector<std::string> dropped_cols;
};

/// First column holds row labels, the header holds column labels, and every
/// other cell is a nonnegative integer count.
CountData ingest_contingency(const CsvTable& csv, const IngestOptions& options = {});

struct CategoricalData {
  DisjunctiveTable table;
  std::vector<std::string> groups;
};

/// One row per observation, labels in the first column, one categorical
/// variable per remaining column. Levels are named "variable=value" and
/// ordered by first appearance.
CategoricalData ingest_categorical(const CsvTable& csv, const IngestOptions& options = {});

/// Disjunctive coding of string columns (observations x variables).
DisjunctiveTable disjunctive_coding(const std::vector<std::vector<std::string>>& values,
                                    const std::vector<std::string>& variable_names,
                                    std::vector<std::string> row_labels = {});

/// Per observation, the value of every variable recovered from the indicator.
std::vector<std::vector<std::string>> decode(const DisjunctiveTable& table);

struct BinSpec {
  int bins = 0;                // quantile bins of comparable sizes
  std::vector<double> breaks;  // explicit upper edges; overrides bins when set
};

struct BinnedColumn {
  std::vector<std::string> values;  // category of every input value
  std::vector<std::string> levels;  // in increasing order
  std::vector<Index> sizes;
};

BinnedColumn bin_numeric(const std::vector<double>& column, const BinSpec& spec);

/// True when every cell parses as a finite number.
bool numeric_column(const std::vector<std::string>& cells);

}  // namespace spafac
