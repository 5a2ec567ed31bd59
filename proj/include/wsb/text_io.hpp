#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace wsb {

/// Splits one CSV record. Handles double-quoted fields with embedded commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field for CSV output when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// One entry per line; blank lines and '#' comments skipped, surrounding whitespace trimmed.
std::vector<std::string> read_word_list(std::istream& in);
std::vector<std::string> read_word_list(const std::filesystem::path& path);

/// Whole file as bytes. Throws IoError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view s);
std::string to_upper_ascii(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Shortest representation that parses back to the same double.
std::string format_double_exact(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace wsb
