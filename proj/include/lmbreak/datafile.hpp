#pragma once

// Delimited text ingestion for the test front end: comma, semicolon, tab or
// whitespace separated, optional header, one value per row in the selected
// column and an optional date/label column echoed for the break location.

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "lmbreak/core.hpp"

namespace lmbreak {

enum class DataKind { levels, returns };
enum class DataTransform { none, absolute };

struct DataFileSpec {
  std::filesystem::path path;
  /// Header name or 1-based index. Empty: column 2 of a two-column file
  /// (column 1 becomes the label column), otherwise column 1.
  std::string column;
  /// Header name or 1-based index; empty for the automatic choice above.
  std::string label_column;
  DataKind kind = DataKind::returns;
  DataTransform transform = DataTransform::none;
};

struct DelimitedTable {
  std::vector<std::string> header;              // empty when the file has none
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;                // 1-based file line per row
};

/// Splits lines on the first delimiter found among ',', ';', '\t', falling
/// back to whitespace. The first line is a header when none of its fields is
/// numeric. Blank lines and lines starting with '#' are skipped.
DelimitedTable read_delimited(std::istream& in);

struct LoadedSeries {
  Series values;                    // after kind/transform
  std::vector<std::string> labels;  // per observation; empty without a label column
  std::vector<int> line_numbers;    // file line of each observation
};

/// Selects the column, rejects unparseable or non-finite rows (listing their
/// line numbers), converts levels to log returns and applies the transform.
/// Throws DataError.
LoadedSeries extract_series(const DelimitedTable& table, const DataFileSpec& spec);
LoadedSeries load_series(const DataFileSpec& spec);

}  // namespace lmbreak
