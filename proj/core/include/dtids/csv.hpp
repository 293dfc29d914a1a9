#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dtids {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated text with a header row. Fields may be double-quoted
/// (RFC 4180 escaping); unquoted fields are trimmed. Blank lines are skipped.
/// Throws IngestError (naming source and line) on ragged rows.
CsvTable parse_csv(std::string_view text, const std::string& source = "<csv>");

/// Joins fields with commas, quoting those that need it.
std::string format_csv_row(const std::vector<std::string>& fields);

}  // namespace dtids
