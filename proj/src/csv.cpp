#include "simboot/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "simboot/error.hpp"

namespace simboot {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != header.size())
        throw DimensionMismatch("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                                std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_number(row[j]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << to_string();
    if (!out) throw Error("failed writing " + path.string());
}

std::vector<std::pair<double, double>> read_two_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open data file " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t number = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a)) continue;
        fields >> b >> extra;
        double x = 0.0, y = 0.0;
        const auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
        const auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
        const bool ok = !b.empty() && extra.empty() && ra.ec == std::errc{} &&
                        ra.ptr == a.data() + a.size() && rb.ec == std::errc{} &&
                        rb.ptr == b.data() + b.size();
        if (!ok) {
            if (header_allowed && rows.empty()) {
                header_allowed = false;
                continue;
            }
            throw ConfigError("", "line is not two numeric columns in " + path.string(), number);
        }
        rows.emplace_back(x, y);
    }
    if (rows.empty()) throw ConfigError("", "no data rows in " + path.string());
    return rows;
}

}  // namespace simboot
