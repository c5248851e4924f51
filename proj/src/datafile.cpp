#include "lmbreak/datafile.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "lmbreak/errors.hpp"

namespace lmbreak {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream in(line);
    std::string field;
    while (in >> field) out.push_back(trim(field));
    return out;
  }
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

char detect_delimiter(const std::string& line) {
  for (char c : {',', ';', '\t'}) {
    if (line.find(c) != std::string::npos) return c;
  }
  return ' ';
}

std::size_t resolve_column(const std::string& selector, const DelimitedTable& t) {
  if (auto idx = parse_number(selector)) {
    if (*idx < 1 || std::floor(*idx) != *idx) {
      throw DataError("column index must be a positive integer: " + selector);
    }
    return static_cast<std::size_t>(*idx) - 1;
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == selector) return i;
  }
  throw DataError("no column named '" + selector + "'");
}

}  // namespace

DelimitedTable read_delimited(std::istream& in) {
  DelimitedTable table;
  std::string line;
  int number = 0;
  char delim = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    if (delim == 0) delim = detect_delimiter(line);
    auto fields = split(line, delim);
    if (first) {
      first = false;
      bool any_numeric = false;
      for (const auto& f : fields) any_numeric = any_numeric || parse_number(f).has_value();
      if (!any_numeric) {
        table.header = std::move(fields);
        continue;
      }
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  return table;
}

LoadedSeries extract_series(const DelimitedTable& table, const DataFileSpec& spec) {
  std::size_t width = table.header.size();
  for (const auto& r : table.rows) width = std::max(width, r.size());

  std::size_t value_col = 0;
  std::optional<std::size_t> label_col;
  if (!spec.column.empty()) {
    value_col = resolve_column(spec.column, table);
  } else if (width == 2) {
    value_col = 1;
    label_col = 0;
  }
  if (!spec.label_column.empty()) label_col = resolve_column(spec.label_column, table);
  if (label_col && *label_col == value_col) label_col.reset();

  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<int> lines;
  std::vector<int> bad;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    std::optional<double> v;
    if (value_col < row.size()) v = parse_number(row[value_col]);
    if (!v || !std::isfinite(*v)) {
      bad.push_back(table.line_numbers[i]);
      continue;
    }
    values.push_back(*v);
    lines.push_back(table.line_numbers[i]);
    if (label_col) labels.push_back(*label_col < row.size() ? row[*label_col] : std::string{});
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad.size() && i < 10; ++i) {
      list += (i ? ", " : "") + std::to_string(bad[i]);
    }
    if (bad.size() > 10) list += fmt::format(", ... ({} rows in total)", bad.size());
    throw DataError("unparseable or missing value on line(s) " + list);
  }

  LoadedSeries out;
  const Eigen::Map<const Series> raw(values.data(), static_cast<Eigen::Index>(values.size()));
  if (spec.kind == DataKind::levels) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0)) {
        throw DataError(fmt::format("nonpositive level {} on line {}", values[i], lines[i]));
      }
    }
    if (values.size() < 2) throw DataError("need at least two levels to form returns");
    out.values = compute_returns(raw);
    // A return belongs to the later of its two observations.
    out.line_numbers.assign(lines.begin() + 1, lines.end());
    if (!labels.empty()) out.labels.assign(labels.begin() + 1, labels.end());
  } else {
    out.values = raw;
    out.line_numbers = std::move(lines);
    out.labels = std::move(labels);
  }
  if (spec.transform == DataTransform::absolute) out.values = absolute_transform(out.values);
  return out;
}

LoadedSeries load_series(const DataFileSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot read data file " + spec.path.string());
  return extract_series(read_delimited(in), spec);
}

}  // namespace lmbreak
