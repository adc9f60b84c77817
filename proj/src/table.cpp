#include "nemscat/table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "nemscat/errors.hpp"

namespace nemscat {

std::size_t CsvTable::column_index(std::string_view column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) return i;
    }
    throw ConfigError("table '" + name + "' has no column '" + std::string(column) + "'");
}

std::vector<double> CsvTable::column(std::string_view column) const
{
    const auto idx = column_index(column);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.at(idx));
    return out;
}

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw IoError("failed to format number");
    return std::string(buf.data(), ptr);
}

std::string to_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

double parse_number(const std::string& field)
{
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw IoError("malformed CSV number '" + field + "'");
    }
    return value;
}

} // namespace

CsvTable parse_csv(std::string_view text, std::string name)
{
    CsvTable table;
    table.name = std::move(name);
    std::stringstream ss{std::string(text)};
    std::string line;
    if (!std::getline(ss, line) || line.empty()) throw IoError("CSV has no header row");
    table.columns = split(line);
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != table.columns.size()) throw IoError("CSV row width mismatch");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_number(f));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace nemscat
