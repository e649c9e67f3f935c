#include "spafac/io.hpp"

#include "spafac/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace spafac {

namespace {

std::string locus(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  require(it != header.end(), ErrorCode::ParseError, "no column named '" + std::string(name) + "' in the header");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && trim(record[0]).empty();
    if (!blank) {
      records.push_back(std::move(record));
      record_lines.push_back(record_line);
    }
    record.clear();
    record_line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !trim(field).empty())
          fail(ErrorCode::ParseError, "unexpected quote inside an unquoted field at " +
                                          locus(line, record.size() + 1));
        field.clear();
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  require(!quoted, ErrorCode::ParseError, "unterminated quoted field starting on " + locus(record_line, record.size() + 1));
  if (!record.empty() || !field.empty()) end_record();

  require(!records.empty(), ErrorCode::ParseError, "input has no header row");
  CsvTable out;
  out.header = std::move(records.front());
  for (auto& h : out.header) h = std::string(trim(h));
  for (std::size_t r = 1; r < records.size(); ++r) {
    require(records[r].size() == out.header.size(), ErrorCode::ParseError,
            "line " + std::to_string(record_lines[r]) + " has " + std::to_string(records[r].size()) +
                " fields, the header has " + std::to_string(out.header.size()));
    out.rows.push_back(std::move(records[r]));
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos && trim(value) == value) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out.push_back('\n');
  return out;
}

CountData ingest_contingency(const CsvTable& csv, const IngestOptions& options) {
  require(csv.header.size() >= 2, ErrorCode::ParseError, "a label column and at least one count column are required");
  std::optional<std::size_t> group_col;
  if (options.group_column) {
    group_col = csv.column(*options.group_column);
    require(*group_col != 0, ErrorCode::ParseError, "the group column cannot be the label column");
  }
  std::vector<std::size_t> count_cols;
  for (std::size_t j = 1; j < csv.header.size(); ++j)
    if (!group_col || j != *group_col) count_cols.push_back(j);
  require(!count_cols.empty(), ErrorCode::ParseError, "no count columns");
  require(!csv.rows.empty(), ErrorCode::EmptyTable, "input has no data rows");

  const auto I = static_cast<Index>(csv.rows.size());
  const auto J = static_cast<Index>(count_cols.size());
  Matrix counts(I, J);
  std::vector<std::string> row_labels;
  std::vector<std::string> groups;
  for (Index i = 0; i < I; ++i) {
    const auto& rec = csv.rows[static_cast<std::size_t>(i)];
    row_labels.emplace_back(trim(rec[0]));
    if (group_col) {
      const auto g = trim(rec[*group_col]);
      require(!g.empty(), ErrorCode::MissingCell, "empty group label at " + locus(static_cast<std::size_t>(i) + 2, *group_col + 1));
      groups.emplace_back(g);
    }
    for (Index j = 0; j < J; ++j) {
      const std::size_t col = count_cols[static_cast<std::size_t>(j)];
      const std::string where = locus(static_cast<std::size_t>(i) + 2, col + 1);
      const auto v = parse_number(rec[col]);
      require(v.has_value(), ErrorCode::ParseError, "expected a count at " + where + ", got '" + rec[col] + "'");
      require(*v >= 0.0, ErrorCode::NegativeCount, "negative count at " + where);
      require(*v == std::floor(*v), ErrorCode::ParseError, "count at " + where + " is not an integer");
      counts(i, j) = *v;
    }
  }
  std::vector<std::string> col_labels;
  for (std::size_t j : count_cols) col_labels.push_back(csv.header[j]);

  CountData out;
  std::vector<Index> keep_rows;
  std::vector<Index> keep_cols;
  for (Index i = 0; i < I; ++i) {
    if (counts.row(i).sum() > 0.0)
      keep_rows.push_back(i);
    else if (options.drop_empty)
      out.dropped_rows.push_back(row_labels[static_cast<std::size_t>(i)]);
    else
      fail(ErrorCode::ZeroMarginal, "row '" + row_labels[static_cast<std::size_t>(i)] +
                                        "' has no counts (use --drop-empty to remove it)");
  }
  for (Index j = 0; j < J; ++j) {
    if (counts.col(j).sum() > 0.0)
      keep_cols.push_back(j);
    else if (options.drop_empty)
      out.dropped_cols.push_back(col_labels[static_cast<std::size_t>(j)]);
    else
      fail(ErrorCode::ZeroMarginal, "column '" + col_labels[static_cast<std::size_t>(j)] +
                                        "' has no counts (use --drop-empty to remove it)");
  }
  require(!keep_rows.empty() && !keep_cols.empty(), ErrorCode::EmptyTable, "table is empty after dropping zero margins");

  Matrix kept(static_cast<Index>(keep_rows.size()), static_cast<Index>(keep_cols.size()));
  std::vector<std::string> rl;
  std::vector<std::string> cl;
  for (std::size_t a = 0; a < keep_rows.size(); ++a) {
    rl.push_back(row_labels[static_cast<std::size_t>(keep_rows[a])]);
    if (group_col) out.groups.push_back(groups[static_cast<std::size_t>(keep_rows[a])]);
    for (std::size_t b = 0; b < keep_cols.size(); ++b)
      kept(static_cast<Index>(a), static_cast<Index>(b)) = counts(keep_rows[a], keep_cols[b]);
  }
  for (Index j : keep_cols) cl.push_back(col_labels[static_cast<std::size_t>(j)]);
  out.table = ContingencyTable::make(std::move(kept), std::move(rl), std::move(cl));
  return out;
}

DisjunctiveTable disjunctive_coding(const std::vector<std::vector<std::string>>& values,
                                    const std::vector<std::string>& variable_names,
                                    std::vector<std::string> row_labels) {
  const std::size_t K = variable_names.size();
  require(K >= 1, ErrorCode::InvalidArgument, "at least one variable is required");
  require(!values.empty(), ErrorCode::EmptyTable, "no observations");
  std::vector<std::vector<std::string>> levels(K);
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i].size() == K, ErrorCode::DimensionMismatch, "observation " + std::to_string(i + 1) +
                                                                     " does not have one value per variable");
    for (std::size_t k = 0; k < K; ++k) {
      require(!values[i][k].empty(), ErrorCode::MissingCell,
              "missing value for variable '" + variable_names[k] + "' in observation " + std::to_string(i + 1));
      auto& lv = levels[k];
      if (std::find(lv.begin(), lv.end(), values[i][k]) == lv.end()) lv.push_back(values[i][k]);
    }
  }
  std::vector<Span> spans;
  std::vector<std::string> level_labels;
  Index offset = 0;
  for (std::size_t k = 0; k < K; ++k) {
    spans.emplace_back(offset, offset + static_cast<Index>(levels[k].size()));
    offset += static_cast<Index>(levels[k].size());
    for (const auto& l : levels[k]) level_labels.push_back(variable_names[k] + "=" + l);
  }
  Matrix ind = Matrix::Zero(static_cast<Index>(values.size()), offset);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const auto& lv = levels[k];
      const auto pos = std::find(lv.begin(), lv.end(), values[i][k]) - lv.begin();
      ind(static_cast<Index>(i), spans[k].first + pos) = 1.0;
    }
  return DisjunctiveTable::make(std::move(ind), std::move(spans), std::move(row_labels), std::move(level_labels),
                                variable_names);
}

CategoricalData ingest_categorical(const CsvTable& csv, const IngestOptions& options) {
  require(csv.header.size() >= 2, ErrorCode::ParseError, "a label column and at least one variable are required");
  require(!csv.rows.empty(), ErrorCode::EmptyTable, "input has no data rows");
  std::optional<std::size_t> group_col;
  if (options.group_column) {
    group_col = csv.column(*options.group_column);
    require(*group_col != 0, ErrorCode::ParseError, "the group column cannot be the label column");
  }
  std::vector<std::size_t> cols;
  if (options.variables.empty()) {
    for (std::size_t j = 1; j < csv.header.size(); ++j)
      if (!group_col || j != *group_col) cols.push_back(j);
  } else {
    for (const auto& name : options.variables) {
      const std::size_t j = csv.column(name);
      require(j != 0 && (!group_col || j != *group_col), ErrorCode::InvalidArgument,
              "'" + name + "' cannot be used as a variable");
      cols.push_back(j);
    }
  }
  require(!cols.empty(), ErrorCode::ParseError, "no variable columns");

  std::vector<std::vector<std::string>> values;
  std::vector<std::string> row_labels;
  CategoricalData out;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& rec = csv.rows[i];
    row_labels.emplace_back(trim(rec[0]));
    std::vector<std::string> v;
    for (std::size_t j : cols) {
      const auto cell = trim(rec[j]);
      require(!cell.empty(), ErrorCode::MissingCell, "missing value at " + locus(i + 2, j + 1));
      v.emplace_back(cell);
    }
    values.push_back(std::move(v));
    if (group_col) {
      const auto g = trim(rec[*group_col]);
      require(!g.empty(), ErrorCode::MissingCell, "empty group label at " + locus(i + 2, *group_col + 1));
      out.groups.emplace_back(g);
    }
  }
  std::vector<std::string> names;
  for (std::size_t j : cols) names.push_back(csv.header[j]);
  out.table = disjunctive_coding(values, names, std::move(row_labels));
  return out;
}

std::vector<std::vector<std::string>> decode(const DisjunctiveTable& table) {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(table.indicator.rows()));
  for (Index i = 0; i < table.indicator.rows(); ++i)
    for (std::size_t k = 0; k < table.variable_spans.size(); ++k) {
      const auto [first, last] = table.variable_spans[k];
      for (Index j = first; j < last; ++j)
        if (table.indicator(i, j) == 1.0) {
          const std::string& label = table.level_labels[static_cast<std::size_t>(j)];
          const std::string prefix = table.variable_names[k] + "=";
          out[static_cast<std::size_t>(i)].push_back(label.rfind(prefix, 0) == 0 ? label.substr(prefix.size()) : label);
        }
    }
  return out;
}

bool numeric_column(const std::vector<std::string>& cells) {
  return !cells.empty() && std::all_of(cells.begin(), cells.end(), [](const auto& c) { return parse_number(c).has_value(); });
}

namespace {

// Cut positions (indices into the distinct values, exclusive ends) that make
// bins as equal as ties allow: minimize the largest deviation from n/k, then
// the sum of squared deviations.
std::vector<std::size_t> balanced_cuts(const std::vector<Index>& counts, int k) {
  const std::size_t d = counts.size();
  std::vector<double> S(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) S[i + 1] = S[i] + static_cast<double>(counts[i]);
  const double target = S[d] / k;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto K = static_cast<std::size_t>(k);
  auto dev = [&](std::size_t m, std::size_t i) { return std::abs(S[i] - S[m] - target); };

  std::vector<std::vector<double>> worst(K + 1, std::vector<double>(d + 1, inf));
  worst[0][0] = 0.0;
  for (std::size_t j = 1; j <= K; ++j)
    for (std::size_t i = j; i <= d; ++i)
      for (std::size_t m = j - 1; m < i; ++m)
        if (worst[j - 1][m] < inf) worst[j][i] = std::min(worst[j][i], std::max(worst[j - 1][m], dev(m, i)));
  const double bound = worst[K][d] + 1e-9;

  std::vector<std::vector<double>> cost(K + 1, std::vector<double>(d + 1, inf));
  std::vector<std::vector<std::size_t>> from(K + 1, std::vector<std::size_t>(d + 1, 0));
  cost[0][0] = 0.0;
  for (std::size_t j = 1; j <= K; ++j)
    for (std::size_t i = j; i <= d; ++i)
      for (std::size_t m = j - 1; m < i; ++m) {
        const double e = dev(m, i);
        if (cost[j - 1][m] == inf || e > bound) continue;
        const double c = cost[j - 1][m] + e * e;
        if (c < cost[j][i]) {
          cost[j][i] = c;
          from[j][i] = m;
        }
      }
  std::vector<std::size_t> ends(K);
  std::size_t i = d;
  for (std::size_t j = K; j >= 1; --j) {
    ends[j - 1] = i;
    i = from[j][i];
  }
  return ends;
}

}  // namespace

BinnedColumn bin_numeric(const std::vector<double>& column, const BinSpec& spec) {
  require(!column.empty(), ErrorCode::EmptyTable, "nothing to bin");
  for (double v : column) require(std::isfinite(v), ErrorCode::MissingCell, "non-finite value in a numeric column");
  BinnedColumn out;
  out.values.resize(column.size());

  if (!spec.breaks.empty()) {
    const auto& b = spec.breaks;
    for (std::size_t i = 1; i < b.size(); ++i)
      require(b[i] > b[i - 1], ErrorCode::InvalidArgument, "bin breaks must be strictly increasing");
    out.levels.push_back("<=" + format_number(b.front()));
    for (std::size_t i = 1; i < b.size(); ++i)
      out.levels.push_back("(" + format_number(b[i - 1]) + "," + format_number(b[i]) + "]");
    out.levels.push_back(">" + format_number(b.back()));
    out.sizes.assign(out.levels.size(), 0);
    for (std::size_t i = 0; i < column.size(); ++i) {
      const auto bin = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), column[i]) - b.begin());
      out.values[i] = out.levels[bin];
      ++out.sizes[bin];
    }
    return out;
  }

  require(spec.bins >= 1, ErrorCode::InvalidArgument, "bin count must be at least 1");
  std::map<double, Index> distinct;
  for (double v : column) ++distinct[v];
  require(static_cast<int>(distinct.size()) >= spec.bins, ErrorCode::TooFewDistinct,
          "column has " + std::to_string(distinct.size()) + " distinct values, fewer than the " +
              std::to_string(spec.bins) + " bins requested");
  std::vector<double> keys;
  std::vector<Index> counts;
  for (const auto& [v, n] : distinct) {
    keys.push_back(v);
    counts.push_back(n);
  }
  const auto ends = balanced_cuts(counts, spec.bins);
  std::vector<double> upper;
  std::size_t start = 0;
  for (std::size_t e : ends) {
    const double lo = keys[start];
    const double hi = keys[e - 1];
    out.levels.push_back(lo == hi ? format_number(lo) : format_number(lo) + ".." + format_number(hi));
    Index n = 0;
    for (std::size_t i = start; i < e; ++i) n += counts[i];
    out.sizes.push_back(n);
    upper.push_back(hi);
    start = e;
  }
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto bin = static_cast<std::size_t>(std::lower_bound(upper.begin(), upper.end(), column[i]) - upper.begin());
    out.values[i] = out.levels[bin];
  }
  return out;
}

}  // namespace spafac
