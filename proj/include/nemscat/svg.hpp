#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "nemscat/table.hpp"

namespace nemscat {

struct PlotOptions {
    std::string title;
    std::string x_column = "t";
    std::string x_label = "t";
    std::string y_label;
};

/// Standalone SVG line plot, one polyline per column against `x_column`. Output depends
/// only on the table contents, so identical input gives identical bytes.
std::string render_svg(const CsvTable& table, std::span<const std::string> columns,
                       const PlotOptions& options = {});

/// Complex-plane orbits of an `orbits` table: cavity amplitude on the left, resonator on
/// the right, forward and time-reversed paths, with radius-1/2 circles at the end points.
std::string render_orbit_svg(const CsvTable& orbits, const std::string& title = {});

void emit_svg(const CsvTable& table, std::span<const std::string> columns,
              const std::filesystem::path& path, const PlotOptions& options = {});

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace nemscat
