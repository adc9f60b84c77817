#include "nemscat/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "nemscat/errors.hpp"

namespace nemscat {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#17becf"};

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finalize()
    {
        if (!std::isfinite(lo)) lo = hi = 0.0;
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

/// Maps data coordinates into a pixel rectangle.
struct Frame {
    double left, top, width, height;
    Range x, y;

    double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
    double py(double v) const { return top + height - (v - y.lo) / (y.hi - y.lo) * height; }
};

void draw_axes(std::string& svg, const Frame& f, const std::string& x_label,
               const std::string& y_label)
{
    svg += "<rect x=\"" + fixed(f.left) + "\" y=\"" + fixed(f.top) + "\" width=\"" +
           fixed(f.width) + "\" height=\"" + fixed(f.height) +
           "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / ticks;
        const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / ticks;
        const double xp = f.px(xv);
        const double yp = f.py(yv);
        const double bottom = f.top + f.height;
        svg += "<line x1=\"" + fixed(xp) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(xp) +
               "\" y2=\"" + fixed(bottom + 5) + "\" stroke=\"#000\"/>\n";
        svg += "<text x=\"" + fixed(xp) + "\" y=\"" + fixed(bottom + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
        svg += "<line x1=\"" + fixed(f.left - 5) + "\" y1=\"" + fixed(yp) + "\" x2=\"" +
               fixed(f.left) + "\" y2=\"" + fixed(yp) + "\" stroke=\"#000\"/>\n";
        svg += "<text x=\"" + fixed(f.left - 8) + "\" y=\"" + fixed(yp + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(f.left + f.width / 2) + "\" y=\"" +
           fixed(f.top + f.height + 38) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           escape(x_label) + "</text>\n";
    const double yc = f.top + f.height / 2;
    svg += "<text x=\"" + fixed(f.left - 52) + "\" y=\"" + fixed(yc) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           fixed(f.left - 52) + " " + fixed(yc) + ")\">" + escape(y_label) + "</text>\n";
}

void draw_polyline(std::string& svg, const Frame& f, const std::vector<double>& xs,
                   const std::vector<double>& ys, const char* colour, bool dashed)
{
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
        if (!points.empty()) points += ' ';
        points += fixed(f.px(xs[i])) + "," + fixed(f.py(ys[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"1.5\"" + (dashed ? " stroke-dasharray=\"6,4\"" : "") +
           " points=\"" + points + "\"/>\n";
}

std::string header(double width, double height, const std::string& title)
{
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" +
           fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) +
           "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    if (!title.empty()) {
        svg += "<text x=\"" + fixed(width / 2) +
               "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" + escape(title) +
               "</text>\n";
    }
    return svg;
}

} // namespace

std::string render_svg(const CsvTable& table, std::span<const std::string> columns,
                       const PlotOptions& options)
{
    if (table.rows.empty()) throw ConfigError("cannot plot table '" + table.name + "': no rows");
    if (columns.empty()) throw ConfigError("no columns selected for plotting");

    const auto xs = table.column(options.x_column);
    std::vector<std::vector<double>> series;
    for (const auto& c : columns) series.push_back(table.column(c));

    Frame frame{80.0, 40.0, 600.0, 360.0, {}, {}};
    for (const double x : xs) frame.x.include(x);
    for (const auto& s : series)
        for (const double y : s) frame.y.include(y);
    frame.x.finalize();
    frame.y.finalize();

    std::string svg = header(720.0, 520.0, options.title);
    draw_axes(svg, frame, options.x_label,
              options.y_label.empty() ? columns.front() : options.y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        draw_polyline(svg, frame, xs, series[i], kPalette[i % kPalette.size()], i > 0);
    }
    // legend
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const double y = 470.0 + 16.0 * static_cast<double>(i);
        svg += "<line x1=\"90\" y1=\"" + fixed(y) + "\" x2=\"120\" y2=\"" + fixed(y) +
               "\" stroke=\"" + kPalette[i % kPalette.size()] + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"128\" y=\"" + fixed(y + 4) + "\" font-size=\"12\">" +
               escape(columns[i]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_orbit_svg(const CsvTable& orbits, const std::string& title)
{
    if (orbits.rows.empty()) throw ConfigError("cannot plot orbits: no rows");
    std::string svg = header(960.0, 520.0, title);

    struct Panel {
        const char* mode;
        const char* label;
        double left;
    };
    const Panel panels[2] = {{"alpha", "cavity amplitude", 70.0}, {"beta", "resonator amplitude", 550.0}};

    for (const auto& panel : panels) {
        const std::string m = panel.mode;
        const auto fwd_re = orbits.column("re_" + m + "_fwd");
        const auto fwd_im = orbits.column("im_" + m + "_fwd");
        const auto rev_re = orbits.column("re_" + m + "_rev");
        const auto rev_im = orbits.column("im_" + m + "_rev");

        Frame frame{panel.left, 50.0, 380.0, 380.0, {}, {}};
        for (const auto* v : {&fwd_re, &rev_re, &fwd_im, &rev_im}) {
            for (const double x : *v) {
                frame.x.include(x);
                frame.y.include(x);
            }
        }
        // Square frame with room for the radius-1/2 circles.
        frame.x.lo = frame.y.lo = std::min(frame.x.lo, frame.y.lo) - 0.6;
        frame.x.hi = frame.y.hi = std::max(frame.x.hi, frame.y.hi) + 0.6;

        draw_axes(svg, frame, std::string("Re ") + panel.label, std::string("Im ") + panel.label);
        draw_polyline(svg, frame, fwd_re, fwd_im, kPalette[0], false);
        draw_polyline(svg, frame, rev_re, rev_im, kPalette[1], true);

        const double radius = 0.5 * frame.width / (frame.x.hi - frame.x.lo);
        const std::size_t last = fwd_re.size() - 1;
        const std::pair<double, double> centres[3] = {
            {fwd_re[0], fwd_im[0]}, {fwd_re[last], fwd_im[last]}, {rev_re[last], rev_im[last]}};
        for (int i = 0; i < 3; ++i) {
            svg += "<circle cx=\"" + fixed(frame.px(centres[i].first)) + "\" cy=\"" +
                   fixed(frame.py(centres[i].second)) + "\" r=\"" + fixed(radius) +
                   "\" fill=\"none\" stroke=\"#555\"" +
                   (i == 0 ? std::string{} : std::string(" stroke-dasharray=\"3,3\"")) + "/>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

void emit_svg(const CsvTable& table, std::span<const std::string> columns,
              const std::filesystem::path& path, const PlotOptions& options)
{
    write_text_file(path, render_svg(table, columns, options));
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace nemscat
