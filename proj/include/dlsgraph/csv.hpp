#pragma once

// Minimal RFC 4180 CSV: header row, quoted fields (with "" escapes and
// embedded delimiters/newlines), CRLF or LF line ends, optional UTF-8 BOM.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlsgraph {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index of `name`, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is, char delimiter = ',');
CsvTable read_csv_file(const std::string& path, char delimiter = ',');

/// Writes one CSV record, quoting fields that need it.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields, char delimiter = ',');

/// Shortest decimal text that parses back to the same double; "inf" for infinity.
std::string format_double(double value);

}  // namespace dlsgraph
