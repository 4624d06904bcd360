#include "siolab/csv.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include "siolab/config.hpp"

namespace siolab {

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != header.size()) throw std::invalid_argument("csv: row width does not match header in " + name);
    rows.push_back(std::move(row));
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_format(const CsvCell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return csv_escape(*s);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::to_string(std::get<long long>(cell));
}

void CsvTable::write(std::ostream& os) const {
    for (const auto& c : comments) os << "# " << c << "\r\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_escape(header[i]);
    os << "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_format(row[i]);
        os << "\r\n";
    }
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

}  // namespace siolab
