#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace siolab {

using CsvCell = std::variant<std::string, double, long long>;

/// In-memory table written as RFC 4180 CSV. Floats use 17 significant digits
/// so values round-trip exactly.
struct CsvTable {
    std::string name;                  // file stem
    std::vector<std::string> comments; // "# ..." lines before the header
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;

    void add_row(std::vector<CsvCell> row);
    void write(std::ostream& os) const;
    std::string to_string() const;
};

std::string csv_escape(const std::string& field);
std::string csv_format(const CsvCell& cell);

}  // namespace siolab
