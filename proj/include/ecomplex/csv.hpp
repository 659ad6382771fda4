#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecomplex::csv {

/// Split one CSV record. Double-quoted fields may contain commas and ""
/// escapes; surrounding whitespace is kept verbatim.
std::vector<std::string> split_line(std::string_view line);

/// Quote a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Empty string for a missing value.
std::string format_optional(const std::optional<double>& value);

/// Strict decimal parse of the whole field; nullopt on failure.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Write through a sibling temp file and rename into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace ecomplex::csv
