#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nemscat/dissipative.hpp"
#include "nemscat/lindblad.hpp"
#include "nemscat/physical_params.hpp"
#include "nemscat/table.hpp"

namespace nemscat {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ParameterMode { device_units, dimensionless };

enum class OutputKind { trajectory, decoherence, p_minus, oracle_compare, orbits };

std::string_view to_string(OutputKind kind);
std::string_view to_string(ParameterMode mode);

/// Either {chi, Omega, kappa} or {g, lambda, delta}.
struct ModelSpec {
    std::optional<double> chi, Omega, kappa;
    std::optional<double> g, lambda, delta;

    bool operator==(const ModelSpec&) const = default;
};

struct TimeGrid {
    double t_max = 1.0;
    int n_points = 2;

    /// t_i = t_max * i / (n_points - 1)
    std::vector<double> points() const;
    bool operator==(const TimeGrid&) const = default;
};

struct OracleSpec {
    int n_a = 16;
    int n_b = 16;
    double dt = 0.0025;

    bool operator==(const OracleSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ParameterMode mode = ParameterMode::dimensionless;
    std::optional<DeviceParams> device; // device-units only
    std::optional<ModelSpec> model;     // dimensionless only
    DampingParams damping;
    InitialAmplitudes initial;
    TimeGrid time;
    std::optional<OracleSpec> oracle;
    std::vector<OutputKind> outputs;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Validates and converts a JSON document. Unknown keys, missing fields and invariant
/// violations raise ConfigError with the offending key path in the message.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(std::string_view text);

/// Effective model implied by the configuration (device pipeline or direct constants).
EffectiveModel resolve_model(const ScenarioConfig& cfg);

/// Raw couplings; only available in device-units mode.
RawCouplings resolve_couplings(const ScenarioConfig& cfg);

struct RunManifest {
    std::string scenario;
    std::string config_hash; // FNV-1a 64 of the canonical config JSON, hex
    std::string tool_version;
    double wall_time_seconds = 0.0;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

struct ScenarioResult {
    std::vector<CsvTable> tables; // one per requested output, declaration order
    RunManifest manifest;
};

std::string config_hash(const ScenarioConfig& cfg);

/// Builds one output table.
CsvTable build_output(const ScenarioConfig& cfg, OutputKind kind);

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Column layout of each output kind; fixed, in this order.
const std::vector<std::string>& output_columns(OutputKind kind);

// ---------------------------------------------------------------------------------------
// Presets

/// Known presets: fig2, fig3-orbits, fig4, fig5, fig6.
const std::vector<std::string>& figure_preset_names();

/// Throws ConfigError listing the valid names for an unknown preset.
ScenarioConfig figure_preset(std::string_view name);

/// The preset plus any companion parameterisations that are run alongside it
/// (fig4 and fig5 also run the chi = Omega = 0 variant).
std::vector<ScenarioConfig> figure_variants(std::string_view name);

/// Columns drawn in the SVG for one output table of a scenario. Orbit tables are drawn
/// as complex-plane orbits instead and return an empty list.
std::vector<std::string> plot_columns(const ScenarioConfig& cfg, OutputKind kind);

/// Writes <out_dir>/<name>_<output>.csv (and/or .svg) for every table plus
/// <out_dir>/<name>_manifest.json. Returns the written paths in order.
std::vector<std::filesystem::path> write_result(const ScenarioConfig& cfg,
                                                const ScenarioResult& result,
                                                const std::filesystem::path& out_dir,
                                                bool csv, bool svg);

// ---------------------------------------------------------------------------------------
// Sweeps

struct Revival {
    double time = 0.0;
    double height = 0.0;
};

/// First revival of P_-: after P_- first falls below `threshold`, the maximum of the
/// first later run of samples at or above it. NaNs when no revival is seen.
Revival first_revival(std::span<const double> t, std::span<const double> p,
                      double threshold = 0.75);

struct SweepResult {
    std::vector<double> values;
    std::vector<CsvTable> tables; // per output kind, sweep_value column first
    CsvTable summary;             // sweep_value, first_revival_time, first_revival_height
};

/// Sets the scalar at `param_path` (dotted, e.g. "model.kappa"; several comma-separated
/// paths are tied to the same value) to each of `steps` evenly spaced values and runs
/// the scenario. Values run in parallel; output order is
/// the value order.
SweepResult sweep(const ScenarioConfig& cfg, std::string_view param_path, double from, double to,
                  int steps);

/// Config with one scalar replaced; non-scalar or unknown paths raise ConfigError.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, std::string_view param_path,
                              double value);

} // namespace nemscat
