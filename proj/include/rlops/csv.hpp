#pragma once

#include <string>
#include <vector>

namespace rlops {

/// Shortest round-trip decimal form (std::to_chars); deterministic, locale-free.
std::string format_double(double x);

/// Minimal CSV reader: splits on commas, no quoting. Skips blank lines and
/// lines starting with '#'. Every row must have the same arity as the first.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Parses a CSV whose first non-comment line is a header and whose remaining
/// cells are numeric. Throws std::runtime_error with row/column diagnostics.
CsvTable parse_numeric_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace rlops
