#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nemscat {

/// Column-named numeric table; one row per time point (or per sweep value and time point).
struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a column; throws ConfigError naming the missing column.
    std::size_t column_index(std::string_view column) const;
    std::vector<double> column(std::string_view column) const;
};

/// Shortest exact text for a double at 17 significant digits ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_number(double value);

/// Header row then one line per row, ',' separated, '\n' terminated.
std::string to_csv(const CsvTable& table);

/// Parses text produced by to_csv back into a table.
CsvTable parse_csv(std::string_view text, std::string name = {});

} // namespace nemscat
