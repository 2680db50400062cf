#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vulncure::io {

/// Writes to a temporary sibling and renames it over the target, so readers
/// never observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Fixed-point rendering independent of the global locale.
std::string format_fixed(double value, int decimals);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

/// Splits tab-separated lines; a trailing '\r' is dropped. Lines starting with
/// '#' and blank lines are skipped.
std::vector<std::vector<std::string>> parse_tsv(std::string_view text);

}  // namespace vulncure::io
