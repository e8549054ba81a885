#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace simboot {

/// Rectangular numeric table written with '.' decimals and 12 significant digits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
};

/// Shortest general-format rendering with 12 significant digits; "nan" and
/// "inf"/"-inf" for non-finite values.
std::string format_number(double value);

/// Parses a file of two whitespace- or comma-separated numeric columns,
/// skipping blank lines, '#' comments and one optional non-numeric header.
std::vector<std::pair<double, double>> read_two_columns(const std::filesystem::path& path);

}  // namespace simboot
