#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace acoso::io {

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// One parsed CSV record plus the physical line it started on.
struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields may contain commas, doubled quotes and newlines.
/// A trailing CR before LF is dropped. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source);

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

/// Fixed two-decimal rendering with half-up rounding at the second decimal.
std::string format_percent(double value);

/// Reads a one-entry-per-line list. Blank lines and `#` comments are ignored;
/// surrounding whitespace is trimmed.
std::vector<std::string> read_lines(const std::filesystem::path& path, bool allow_comments);

}  // namespace acoso::io
