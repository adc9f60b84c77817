#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include "nemscat/errors.hpp"
#include "nemscat/parallel.hpp"
#include "nemscat/scenario.hpp"
#include "nemscat/svg.hpp"

namespace nemscat {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class E>
[[noreturn]] void rethrow_as(const E& e, const std::string& context)
{
    throw E(context + ": " + e.what());
}

struct BranchSeries {
    std::vector<ModePair> plus, minus;
};

BranchSeries damped_series(const ScenarioConfig& cfg, const EffectiveModel& model,
                           std::span<const double> grid)
{
    BranchSeries s;
    s.plus.reserve(grid.size());
    s.minus.reserve(grid.size());
    for (const double t : grid) {
        s.plus.push_back(damped_amplitudes_closed(cfg.initial, model, cfg.damping, t,
                                                  Branch::plus).value);
        s.minus.push_back(damped_amplitudes_closed(cfg.initial, model, cfg.damping, t,
                                                   Branch::minus).value);
    }
    return s;
}

CsvTable trajectory_table(const ScenarioConfig& cfg, const EffectiveModel& model,
                          std::span<const double> grid)
{
    CsvTable table{"trajectory", output_columns(OutputKind::trajectory), {}};
    const auto s = damped_series(cfg, model, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = s.plus[i];
        const auto& m = s.minus[i];
        table.rows.push_back({grid[i], p.alpha.real(), p.alpha.imag(), p.beta.real(),
                              p.beta.imag(), m.alpha.real(), m.alpha.imag(), m.beta.real(),
                              m.beta.imag(), std::norm(p.alpha) + std::norm(p.beta),
                              std::norm(m.alpha) + std::norm(m.beta)});
    }
    return table;
}

CsvTable orbits_table(const ScenarioConfig& cfg, const EffectiveModel& model,
                      std::span<const double> grid)
{
    CsvTable table{"orbits", output_columns(OutputKind::orbits), {}};
    for (const double t : grid) {
        const auto fwd = evolve_amplitudes(cfg.initial, model, t, Branch::plus);
        const auto rev = evolve_amplitudes(cfg.initial, model, t, Branch::minus);
        table.rows.push_back({t, fwd.alpha.real(), fwd.alpha.imag(), rev.alpha.real(),
                              rev.alpha.imag(), fwd.beta.real(), fwd.beta.imag(),
                              rev.beta.real(), rev.beta.imag()});
    }
    return table;
}

CsvTable decoherence_table(const ScenarioConfig& cfg, const EffectiveModel& model,
                           std::span<const double> grid)
{
    CsvTable table{"decoherence", output_columns(OutputKind::decoherence), {}};
    const auto records =
        decoherence_trajectory(grid, cfg.initial, model, cfg.damping, FMethod::closed);
    for (const auto& r : records) {
        const double short_f2 = r.f_short_time ? std::norm(*r.f_short_time) : kNaN;
        table.rows.push_back({r.t, r.f.real(), r.f.imag(), std::norm(r.f), r.log_f.real(),
                              r.log_f.imag(), short_f2, r.f.real()});
    }
    return table;
}

CsvTable p_minus_table(const ScenarioConfig& cfg, const EffectiveModel& model,
                       std::span<const double> grid)
{
    CsvTable table{"p_minus", output_columns(OutputKind::p_minus), {}};
    const auto records =
        decoherence_trajectory(grid, cfg.initial, model, cfg.damping, FMethod::closed);
    const auto s = damped_series(cfg, model, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = s.plus[i];
        const auto& m = s.minus[i];
        const cplx signal = records[i].f * coherent_overlap(p.alpha, m.alpha) *
                            coherent_overlap(p.beta, m.beta);
        table.rows.push_back({grid[i], p_minus_dissipative(records[i], m, p),
                              p_minus(cfg.initial, model, grid[i]), std::abs(signal),
                              std::arg(signal)});
    }
    return table;
}

CsvTable oracle_table(const ScenarioConfig& cfg, const EffectiveModel& model,
                      std::span<const double> grid)
{
    if (!cfg.oracle) throw ConfigError("oracle_compare needs an 'oracle' section");
    const auto trunc = FockTruncation::make(cfg.oracle->n_a, cfg.oracle->n_b,
                                            std::sqrt(cfg.initial.excitation()));
    OracleOptions opts;
    opts.dt = cfg.oracle->dt;
    const auto report = run_oracle(cfg.initial, model, cfg.damping, trunc, grid, opts);
    CsvTable table{"oracle_compare", output_columns(OutputKind::oracle_compare), {}};
    for (const auto& r : report.rows) {
        table.rows.push_back({r.t, r.f_numeric.real(), r.f_numeric.imag(), r.f_closed.real(),
                              r.f_closed.imag(), std::abs(r.f_numeric - r.f_closed),
                              r.p_minus_numeric, r.p_minus_closed, r.fidelity_pp,
                              r.fidelity_mm});
    }
    return table;
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ScenarioConfig lossless_base(std::string name, double t_max, int n, OutputKind kind)
{
    ScenarioConfig cfg;
    cfg.name = std::move(name);
    cfg.mode = ParameterMode::dimensionless;
    cfg.model = ModelSpec{1.0, 1.0, 1.0, {}, {}, {}};
    cfg.initial = {0.0, 4.0};
    cfg.time = {t_max, n};
    cfg.outputs = {kind};
    return cfg;
}

ScenarioConfig damped_base(std::string name)
{
    ScenarioConfig cfg;
    cfg.name = std::move(name);
    cfg.mode = ParameterMode::dimensionless;
    cfg.model = ModelSpec{1.0, 1.0, 1.0, {}, {}, {}};
    cfg.damping = DampingParams::make(0.1, 0.1);
    cfg.initial = {0.0, 2.0};
    cfg.time = {2.0, 401};
    cfg.outputs = {OutputKind::decoherence};
    return cfg;
}

ScenarioConfig caption_variant(ScenarioConfig cfg)
{
    cfg.name += "-caption";
    cfg.model = ModelSpec{0.0, 0.0, 1.0, {}, {}, {}};
    cfg.initial = {2.0, 2.0};
    return cfg;
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        parts.emplace_back(path.substr(start, dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts;
}

} // namespace

const std::vector<std::string>& output_columns(OutputKind kind)
{
    static const std::vector<std::string> trajectory = {
        "t",           "re_alpha_plus",  "im_alpha_plus",  "re_beta_plus",
        "im_beta_plus", "re_alpha_minus", "im_alpha_minus", "re_beta_minus",
        "im_beta_minus", "excitation_plus", "excitation_minus"};
    static const std::vector<std::string> decoherence = {
        "t", "re_f", "im_f", "abs_f2", "re_log_f", "im_log_f", "abs_f2_short", "sigma_x"};
    static const std::vector<std::string> pminus = {"t", "p_minus", "p_minus_lossless",
                                                    "visibility", "phase"};
    static const std::vector<std::string> oracle = {
        "t",           "re_f_num",    "im_f_num",       "re_f_closed", "im_f_closed",
        "abs_err_f",   "p_minus_num", "p_minus_closed", "fidelity_pp", "fidelity_mm"};
    static const std::vector<std::string> orbits = {
        "t",           "re_alpha_fwd", "im_alpha_fwd", "re_alpha_rev", "im_alpha_rev",
        "re_beta_fwd", "im_beta_fwd",  "re_beta_rev",  "im_beta_rev"};
    switch (kind) {
    case OutputKind::trajectory: return trajectory;
    case OutputKind::decoherence: return decoherence;
    case OutputKind::p_minus: return pminus;
    case OutputKind::oracle_compare: return oracle;
    case OutputKind::orbits: return orbits;
    }
    return trajectory;
}

json RunManifest::to_json() const
{
    return {{"scenario", scenario},
            {"config_hash", config_hash},
            {"tool_version", tool_version},
            {"wall_time_seconds", wall_time_seconds},
            {"outputs", outputs}};
}

std::string config_hash(const ScenarioConfig& cfg)
{
    static constexpr char digits[] = "0123456789abcdef";
    auto h = fnv1a(config_to_json(cfg).dump());
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xF];
    return out;
}

CsvTable build_output(const ScenarioConfig& cfg, OutputKind kind)
{
    const std::string context =
        "scenario '" + cfg.name + "', output '" + std::string(to_string(kind)) + "'";
    try {
        const auto model = resolve_model(cfg);
        const auto grid = cfg.time.points();
        switch (kind) {
        case OutputKind::trajectory: return trajectory_table(cfg, model, grid);
        case OutputKind::decoherence: return decoherence_table(cfg, model, grid);
        case OutputKind::p_minus: return p_minus_table(cfg, model, grid);
        case OutputKind::oracle_compare: return oracle_table(cfg, model, grid);
        case OutputKind::orbits: return orbits_table(cfg, model, grid);
        }
        throw ConfigError("unknown output kind");
    } catch (const NumericalGateError& e) {
        rethrow_as(e, context);
    } catch (const ConfigError& e) {
        rethrow_as(e, context);
    } catch (const DomainError& e) {
        rethrow_as(e, context);
    }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    ScenarioResult result;
    for (const auto kind : cfg.outputs) result.tables.push_back(build_output(cfg, kind));
    result.manifest.scenario = cfg.name;
    result.manifest.config_hash = config_hash(cfg);
    result.manifest.tool_version = std::string(kToolVersion);
    for (const auto kind : cfg.outputs) result.manifest.outputs.emplace_back(to_string(kind));
    result.manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

const std::vector<std::string>& figure_preset_names()
{
    static const std::vector<std::string> names = {"fig2", "fig3-orbits", "fig4", "fig5",
                                                   "fig6"};
    return names;
}

ScenarioConfig figure_preset(std::string_view name)
{
    if (name == "fig2") return lossless_base("fig2", 2.0 * std::numbers::pi, 2001, OutputKind::p_minus);
    if (name == "fig3-orbits") {
        return lossless_base("fig3-orbits", std::numbers::pi, 401, OutputKind::orbits);
    }
    if (name == "fig4") return damped_base("fig4");
    if (name == "fig5") return damped_base("fig5");
    if (name == "fig6") {
        ScenarioConfig cfg;
        cfg.name = "fig6";
        cfg.mode = ParameterMode::dimensionless;
        cfg.model = ModelSpec{1.0, 0.25, 0.5, {}, {}, {}};
        cfg.damping = DampingParams::make(0.001, 0.01);
        cfg.initial = {2.0, 2.0};
        cfg.time = {40.0, 4001};
        cfg.outputs = {OutputKind::p_minus};
        return cfg;
    }
    std::string known;
    for (const auto& n : figure_preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown figure '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<ScenarioConfig> figure_variants(std::string_view name)
{
    auto cfg = figure_preset(name);
    if (name == "fig4" || name == "fig5") return {cfg, caption_variant(cfg)};
    return {cfg};
}

std::vector<std::string> plot_columns(const ScenarioConfig& cfg, OutputKind kind)
{
    switch (kind) {
    case OutputKind::trajectory: return {"excitation_plus", "excitation_minus"};
    case OutputKind::decoherence:
        if (cfg.name == "fig4") return {"abs_f2_short"};
        if (cfg.name == "fig5") return {"abs_f2", "abs_f2_short"};
        return {"abs_f2"};
    case OutputKind::p_minus: return {"p_minus"};
    case OutputKind::oracle_compare: return {"p_minus_num", "p_minus_closed"};
    case OutputKind::orbits: return {};
    }
    return {};
}

std::vector<std::filesystem::path> write_result(const ScenarioConfig& cfg,
                                                const ScenarioResult& result,
                                                const std::filesystem::path& out_dir,
                                                bool csv, bool svg)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    for (std::size_t i = 0; i < result.tables.size(); ++i) {
        const auto& table = result.tables[i];
        const auto stem = out_dir / (cfg.name + "_" + table.name);
        if (csv) {
            auto path = stem;
            path += ".csv";
            write_text_file(path, to_csv(table));
            written.push_back(path);
        }
        if (svg) {
            auto path = stem;
            path += ".svg";
            const auto kind = cfg.outputs.at(i);
            if (kind == OutputKind::orbits) {
                write_text_file(path, render_orbit_svg(table, cfg.name));
            } else {
                const auto columns = plot_columns(cfg, kind);
                PlotOptions opts;
                opts.title = cfg.name + " " + table.name;
                opts.y_label = columns.size() == 1 ? columns.front() : table.name;
                emit_svg(table, columns, path, opts);
            }
            written.push_back(path);
        }
    }
    const auto manifest = out_dir / (cfg.name + "_manifest.json");
    write_text_file(manifest, result.manifest.to_json().dump(2) + "\n");
    written.push_back(manifest);
    return written;
}

Revival first_revival(std::span<const double> t, std::span<const double> p, double threshold)
{
    if (t.size() != p.size()) throw DomainError("first_revival: t and p differ in length");
    const Revival none{kNaN, kNaN};
    std::size_t i = 0;
    while (i < p.size() && !(p[i] < threshold)) ++i;
    while (i < p.size() && !(p[i] >= threshold)) ++i;
    if (i == p.size()) return none;
    Revival best{t[i], p[i]};
    for (; i < p.size() && p[i] >= threshold; ++i) {
        if (p[i] > best.height) best = {t[i], p[i]};
    }
    return best;
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, std::string_view param_path,
                              double value)
{
    auto j = config_to_json(cfg);
    std::size_t start = 0;
    while (start <= param_path.size()) {
        const auto comma = param_path.find(',', start);
        const auto path = param_path.substr(start, comma - start);
        json* node = &j;
        for (const auto& part : split_path(path)) {
            if (part.empty() || !node->is_object() || !node->contains(part)) {
                throw ConfigError("sweep parameter '" + std::string(path) +
                                  "' does not name a config field");
            }
            node = &(*node)[part];
        }
        if (!node->is_number()) {
            throw ConfigError("sweep parameter '" + std::string(path) + "' is not numeric");
        }
        if (node->is_number_integer() && value == std::round(value)) {
            *node = static_cast<std::int64_t>(value);
        } else {
            *node = value;
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return config_from_json(j);
}

SweepResult sweep(const ScenarioConfig& cfg, std::string_view param_path, double from, double to,
                  int steps)
{
    if (steps < 2) throw ConfigError("sweep needs at least 2 steps");
    if (!std::isfinite(from) || !std::isfinite(to)) throw ConfigError("sweep bounds must be finite");

    SweepResult out;
    std::vector<ScenarioConfig> configs;
    for (int i = 0; i < steps; ++i) {
        const double v = from + (to - from) * i / (steps - 1);
        out.values.push_back(v);
        configs.push_back(with_parameter(cfg, param_path, v));
    }

    std::vector<ScenarioResult> results(configs.size());
    std::vector<Revival> revivals(configs.size());
    parallel_for(configs.size(), worker_count(), [&](std::size_t i) {
        results[i] = run_scenario(configs[i]);
        const auto p = build_output(configs[i], OutputKind::p_minus);
        revivals[i] = first_revival(p.column("t"), p.column("p_minus"));
    });

    for (std::size_t k = 0; k < cfg.outputs.size(); ++k) {
        CsvTable table;
        table.name = "sweep_" + std::string(to_string(cfg.outputs[k]));
        table.columns = {"sweep_value"};
        const auto& cols = output_columns(cfg.outputs[k]);
        table.columns.insert(table.columns.end(), cols.begin(), cols.end());
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (const auto& row : results[i].tables[k].rows) {
                std::vector<double> r{out.values[i]};
                r.insert(r.end(), row.begin(), row.end());
                table.rows.push_back(std::move(r));
            }
        }
        out.tables.push_back(std::move(table));
    }

    out.summary.name = "sweep_summary";
    out.summary.columns = {"sweep_value", "first_revival_time", "first_revival_height"};
    for (std::size_t i = 0; i < revivals.size(); ++i) {
        out.summary.rows.push_back({out.values[i], revivals[i].time, revivals[i].height});
    }
    return out;
}

} // namespace nemscat
