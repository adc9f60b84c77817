#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nemscat/errors.hpp"
#include "nemscat/scenario.hpp"
#include "nemscat/svg.hpp"

namespace fs = std::filesystem;
using namespace nemscat;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kGate = 3, kIo = 4 };

struct Format {
    bool csv = true;
    bool svg = false;
};

Format parse_format(const std::string& f)
{
    if (f == "csv") return {true, false};
    if (f == "svg") return {false, true};
    if (f == "both") return {true, true};
    throw ConfigError("--format must be csv, svg or both");
}

void report(const std::vector<fs::path>& written)
{
    for (const auto& p : written) std::cout << p.string() << "\n";
}

int cmd_couplings(const std::string& config_path, const std::string& out_dir)
{
    const auto cfg = parse_config(config_path);
    const auto model = resolve_model(cfg);
    nlohmann::json j;
    j["scenario"] = cfg.name;
    if (cfg.device) {
        const auto raw = resolve_couplings(cfg);
        j["raw"] = {{"g", raw.g},         {"lambda", raw.lambda}, {"chi_cross", raw.chi_cross},
                    {"x_rms", raw.x_rms}, {"epsilon", raw.epsilon}, {"theta", raw.theta},
                    {"lambda_over_g", raw.lambda / raw.g}};
    }
    j["effective"] = {{"chi", model.chi},         {"Omega", model.Omega}, {"kappa", model.kappa},
                      {"omega_bar", model.omega_bar}, {"Delta", model.Delta}, {"R", model.R}};
    const auto text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / (cfg.name + "_couplings.json"), text);
    }
    return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, Format fmt)
{
    const auto cfg = parse_config(config_path);
    report(write_result(cfg, run_scenario(cfg), out_dir, fmt.csv, fmt.svg));
    return kOk;
}

int cmd_oracle(const std::string& config_path, const std::string& out_dir, Format fmt)
{
    auto cfg = parse_config(config_path);
    if (!cfg.oracle) cfg.oracle = OracleSpec{};
    cfg.outputs = {OutputKind::oracle_compare};
    const auto result = run_scenario(cfg);
    const auto& table = result.tables.front();
    double max_err_f = 0.0;
    double max_err_p = 0.0;
    for (const auto& row : table.rows) {
        max_err_f = std::max(max_err_f, row[table.column_index("abs_err_f")]);
        max_err_p = std::max(max_err_p, std::abs(row[table.column_index("p_minus_num")] -
                                                 row[table.column_index("p_minus_closed")]));
    }
    std::cout << "max |f_num - f_closed| = " << format_number(max_err_f) << "\n"
              << "max |P_num - P_closed| = " << format_number(max_err_p) << "\n";
    report(write_result(cfg, result, out_dir, fmt.csv, fmt.svg));
    return kOk;
}

int cmd_figure(const std::string& name, const std::string& out_dir, Format fmt)
{
    for (const auto& cfg : figure_variants(name)) {
        report(write_result(cfg, run_scenario(cfg), out_dir, fmt.csv, fmt.svg));
    }
    return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& preset, const std::string& param,
              double from, double to, int steps, const std::string& out_dir, Format fmt)
{
    if (config_path.empty() == preset.empty()) {
        throw ConfigError("sweep needs exactly one of --config or --preset");
    }
    const auto cfg = preset.empty() ? parse_config(config_path) : figure_preset(preset);
    const auto result = sweep(cfg, param, from, to, steps);

    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    auto tables = result.tables;
    tables.push_back(result.summary);
    for (const auto& table : tables) {
        const auto stem = fs::path(out_dir) / (cfg.name + "_" + table.name);
        if (fmt.csv) {
            written.push_back(fs::path(stem).concat(".csv"));
            write_text_file(written.back(), to_csv(table));
        }
    }
    if (fmt.svg) {
        written.push_back(fs::path(out_dir) / (cfg.name + "_sweep_summary.svg"));
        const std::vector<std::string> columns = {"first_revival_height"};
        PlotOptions opts;
        opts.title = cfg.name + " sweep of " + param;
        opts.x_column = "sweep_value";
        opts.x_label = param;
        opts.y_label = "first revival height";
        emit_svg(result.summary, columns, written.back(), opts);
    }
    report(written);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cavity / nanomechanical resonator entanglement via a Cooper-pair box"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "csv";
    std::string figure_name;
    std::string preset;
    std::string param;
    double from = 0.0;
    double to = 1.0;
    int steps = 2;

    auto* couplings = app.add_subcommand("couplings", "Print raw and effective couplings");
    couplings->add_option("--config", config_path, "Scenario JSON")->required();
    couplings->add_option("--out-dir", out_dir, "Also write <name>_couplings.json here");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--format", format, "csv, svg or both")
            ->check(CLI::IsMember({"csv", "svg", "both"}))
            ->capture_default_str();
    };

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its outputs");
    simulate->add_option("--config", config_path, "Scenario JSON")->required();
    add_common(simulate);

    auto* oracle = app.add_subcommand("oracle", "Compare closed forms with the master equation");
    oracle->add_option("--config", config_path, "Scenario JSON")->required();
    add_common(oracle);

    auto* figure = app.add_subcommand("figure", "Run a built-in figure preset");
    figure->add_option("name", figure_name, "fig2, fig3-orbits, fig4, fig5 or fig6")->required();
    add_common(figure);

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one scalar config field");
    sweep_cmd->add_option("--config", config_path, "Scenario JSON");
    sweep_cmd->add_option("--preset", preset, "Figure preset used as the base config");
    sweep_cmd->add_option("--param", param, "Dotted path, e.g. model.kappa")->required();
    sweep_cmd->add_option("--from", from, "First value")->required();
    sweep_cmd->add_option("--to", to, "Last value")->required();
    sweep_cmd->add_option("--steps", steps, "Number of values (>= 2)")->required();
    add_common(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const auto fmt = parse_format(format);
        if (couplings->parsed()) {
            const bool explicit_dir = couplings->count("--out-dir") > 0;
            return cmd_couplings(config_path, explicit_dir ? out_dir : std::string{});
        }
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, fmt);
        if (oracle->parsed()) return cmd_oracle(config_path, out_dir, fmt);
        if (figure->parsed()) return cmd_figure(figure_name, out_dir, fmt);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(config_path, preset, param, from, to, steps, out_dir, fmt);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kConfig;
    } catch (const NumericalGateError& e) {
        std::cerr << "numerical gate failed: " << e.what() << "\n";
        return kGate;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
    return kOther;
}
