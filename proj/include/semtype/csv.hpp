#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace semtype {

// Splits one CSV line on commas. No quoting: the formats used by this
// toolkit are plain numeric/identifier columns. A trailing '\r' is stripped.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

// Locale-independent double parsing of an entire token.
std::optional<double> parse_double(const std::string& token);
std::optional<long long> parse_int(const std::string& token);

// Shortest-exact and fixed formatting helpers (snprintf-backed, deterministic).
std::string format_double(double v);            // %.17g round-trip
std::string format_double(double v, int prec);  // %.{prec}g

// Writes to `path` via a temp file + rename so readers never observe a
// truncated file.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace semtype
