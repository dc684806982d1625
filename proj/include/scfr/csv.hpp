#pragma once

// Minimal comma-separated table handling shared by the dataset loader,
// prediction files and report writers.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scfr {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row

  /// Index of a header column, or -1.
  int column(std::string_view name) const;
};

/// Reads a header row plus data rows. Blank lines are skipped; fields are
/// trimmed and may be wrapped in double quotes. Throws DataError.
CsvTable read_csv_table(const std::filesystem::path& path);
CsvTable parse_csv_table(std::string_view text, const std::string& source);

/// Parses a full-field real. Returns false on junk, empty, or non-finite.
bool parse_real(std::string_view field, double& out);

/// Shortest decimal that reads back to the same double.
std::string format_real(double value);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace scfr
