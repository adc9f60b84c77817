#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nemscat/errors.hpp"
#include "nemscat/scenario.hpp"

namespace nemscat {

using nlohmann::json;

namespace {

constexpr std::pair<OutputKind, std::string_view> kOutputNames[] = {
    {OutputKind::trajectory, "trajectory"},
    {OutputKind::decoherence, "decoherence"},
    {OutputKind::p_minus, "p_minus"},
    {OutputKind::oracle_compare, "oracle_compare"},
    {OutputKind::orbits, "orbits"},
};

/// Strict view of one JSON object: every key must be consumed or declared optional.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path, std::set<std::string> allowed)
        : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail(path_, "must be an object");
        for (const auto& item : j_.items()) {
            if (!allowed.count(item.key())) fail(key_path(item.key()), "unknown key");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) const
    {
        if (!has(key)) fail(key_path(key), "missing required field");
        return as_number(key);
    }

    std::optional<double> optional_number(const std::string& key) const
    {
        if (!has(key)) return std::nullopt;
        return as_number(key);
    }

    int integer(const std::string& key) const
    {
        if (!has(key)) fail(key_path(key), "missing required field");
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(key_path(key), "must be an integer");
        return v.get<int>();
    }

    const json& at(const std::string& key) const
    {
        if (!has(key)) fail(key_path(key), "missing required field");
        return j_.at(key);
    }

    std::string key_path(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what)
    {
        throw ConfigError("config error at '" + where + "': " + what);
    }

private:
    double as_number(const std::string& key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(key_path(key), "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key_path(key), "must be finite");
        return x;
    }

    const json& j_;
    std::string path_;
};

DeviceParams device_from_json(const json& j)
{
    ObjectReader r(j, "device",
                   {"E_C", "E_J", "n_g0", "C_g", "C_Sigma", "L", "c", "omega_r", "nu", "m", "d",
                    "delta", "g"});
    DeviceParams p;
    p.E_C = r.number("E_C");
    p.E_J = r.number("E_J");
    p.n_g0 = r.number("n_g0");
    p.C_g = r.number("C_g");
    p.C_Sigma = r.number("C_Sigma");
    p.L = r.number("L");
    p.c = r.number("c");
    p.omega_r = r.number("omega_r");
    p.nu = r.number("nu");
    p.m = r.number("m");
    p.d = r.number("d");
    p.delta = r.number("delta");
    p.g = r.optional_number("g");
    try {
        p.validate();
    } catch (const DomainError& e) {
        ObjectReader::fail("device", e.what());
    }
    return p;
}

ModelSpec model_from_json(const json& j)
{
    ObjectReader r(j, "model", {"chi", "Omega", "kappa", "g", "lambda", "delta"});
    ModelSpec m;
    m.chi = r.optional_number("chi");
    m.Omega = r.optional_number("Omega");
    m.kappa = r.optional_number("kappa");
    m.g = r.optional_number("g");
    m.lambda = r.optional_number("lambda");
    m.delta = r.optional_number("delta");
    const bool direct = m.chi || m.Omega || m.kappa;
    const bool couplings = m.g || m.lambda || m.delta;
    if (direct == couplings) {
        ObjectReader::fail("model", "give exactly one of {chi, Omega, kappa} or {g, lambda, delta}");
    }
    if (direct && !(m.chi && m.Omega && m.kappa)) {
        ObjectReader::fail("model", "chi, Omega and kappa must all be present");
    }
    if (couplings && !(m.g && m.lambda && m.delta)) {
        ObjectReader::fail("model", "g, lambda and delta must all be present");
    }
    if (couplings && *m.delta == 0.0) ObjectReader::fail("model.delta", "must be non-zero");
    return m;
}

std::string_view checked_name(const std::string& name)
{
    if (name.empty()) ObjectReader::fail("name", "must be non-empty");
    for (const char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
            ObjectReader::fail("name", "may only contain letters, digits, '-', '_' and '.'");
        }
    }
    return name;
}

void put_optional(json& j, const char* key, const std::optional<double>& v)
{
    if (v) j[key] = *v;
}

} // namespace

std::string_view to_string(OutputKind kind)
{
    for (const auto& [k, name] : kOutputNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::string_view to_string(ParameterMode mode)
{
    return mode == ParameterMode::device_units ? "device-units" : "dimensionless";
}

std::vector<double> TimeGrid::points() const
{
    std::vector<double> out(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) out[i] = t_max * i / (n_points - 1);
    return out;
}

ScenarioConfig config_from_json(const json& j)
{
    ObjectReader r(j, "",
                   {"name", "mode", "device", "model", "damping", "initial", "time", "oracle",
                    "outputs"});
    ScenarioConfig cfg;

    if (r.has("name")) {
        if (!r.at("name").is_string()) ObjectReader::fail("name", "must be a string");
        cfg.name = std::string(checked_name(r.at("name").get<std::string>()));
    }

    const auto& mode = r.at("mode");
    if (mode == "device-units") {
        cfg.mode = ParameterMode::device_units;
    } else if (mode == "dimensionless") {
        cfg.mode = ParameterMode::dimensionless;
    } else {
        ObjectReader::fail("mode", "must be \"device-units\" or \"dimensionless\"");
    }

    if (r.has("device") && r.has("model")) {
        ObjectReader::fail("device", "'device' and 'model' are mutually exclusive");
    }
    if (cfg.mode == ParameterMode::device_units) {
        if (!r.has("device")) ObjectReader::fail("device", "required in device-units mode");
        cfg.device = device_from_json(r.at("device"));
    } else {
        if (!r.has("model")) ObjectReader::fail("model", "required in dimensionless mode");
        cfg.model = model_from_json(r.at("model"));
    }

    {
        ObjectReader d(r.at("damping"), "damping", {"gamma_a", "gamma_b", "gamma_qubit"});
        const double ga = d.number("gamma_a");
        const double gb = d.number("gamma_b");
        const double gq = d.optional_number("gamma_qubit").value_or(0.0);
        if (ga < 0.0) ObjectReader::fail("damping.gamma_a", "must be >= 0");
        if (gb < 0.0) ObjectReader::fail("damping.gamma_b", "must be >= 0");
        if (gq < 0.0) ObjectReader::fail("damping.gamma_qubit", "must be >= 0");
        cfg.damping = DampingParams::make(ga, gb, gq);
    }
    {
        ObjectReader in(r.at("initial"), "initial",
                        {"alpha0_re", "alpha0_im", "beta0_re", "beta0_im"});
        cfg.initial.alpha0 = {in.number("alpha0_re"), in.number("alpha0_im")};
        cfg.initial.beta0 = {in.number("beta0_re"), in.number("beta0_im")};
    }
    {
        ObjectReader t(r.at("time"), "time", {"t_max", "n_points"});
        cfg.time.t_max = t.number("t_max");
        cfg.time.n_points = t.integer("n_points");
        if (!(cfg.time.t_max > 0.0)) ObjectReader::fail("time.t_max", "must be > 0");
        if (cfg.time.n_points < 2) ObjectReader::fail("time.n_points", "must be >= 2");
    }
    if (r.has("oracle")) {
        ObjectReader o(r.at("oracle"), "oracle", {"n_a", "n_b", "dt"});
        OracleSpec spec;
        spec.n_a = o.integer("n_a");
        spec.n_b = o.integer("n_b");
        spec.dt = o.number("dt");
        if (spec.n_a < 2) ObjectReader::fail("oracle.n_a", "must be >= 2");
        if (spec.n_b < 2) ObjectReader::fail("oracle.n_b", "must be >= 2");
        if (!(spec.dt > 0.0)) ObjectReader::fail("oracle.dt", "must be > 0");
        cfg.oracle = spec;
    }

    const auto& outputs = r.at("outputs");
    if (!outputs.is_array()) ObjectReader::fail("outputs", "must be an array");
    for (const auto& item : outputs) {
        if (!item.is_string()) ObjectReader::fail("outputs", "entries must be strings");
        const auto name = item.get<std::string>();
        const auto* found = std::find_if(std::begin(kOutputNames), std::end(kOutputNames),
                                         [&](const auto& p) { return p.second == name; });
        if (found == std::end(kOutputNames)) {
            ObjectReader::fail("outputs", "unknown output kind '" + name +
                                              "' (expected trajectory, decoherence, p_minus, "
                                              "oracle_compare or orbits)");
        }
        if (std::find(cfg.outputs.begin(), cfg.outputs.end(), found->first) != cfg.outputs.end()) {
            ObjectReader::fail("outputs", "duplicate output kind '" + name + "'");
        }
        cfg.outputs.push_back(found->first);
    }
    if (std::find(cfg.outputs.begin(), cfg.outputs.end(), OutputKind::oracle_compare) !=
            cfg.outputs.end() &&
        !cfg.oracle) {
        ObjectReader::fail("oracle", "required when outputs include oracle_compare");
    }
    return cfg;
}

json config_to_json(const ScenarioConfig& cfg)
{
    json j;
    j["name"] = cfg.name;
    j["mode"] = std::string(to_string(cfg.mode));
    if (cfg.device) {
        const auto& p = *cfg.device;
        json d = {{"E_C", p.E_C},     {"E_J", p.E_J}, {"n_g0", p.n_g0},       {"C_g", p.C_g},
                  {"C_Sigma", p.C_Sigma}, {"L", p.L}, {"c", p.c},             {"omega_r", p.omega_r},
                  {"nu", p.nu},       {"m", p.m},     {"d", p.d},             {"delta", p.delta}};
        put_optional(d, "g", p.g);
        j["device"] = d;
    }
    if (cfg.model) {
        json m = json::object();
        put_optional(m, "chi", cfg.model->chi);
        put_optional(m, "Omega", cfg.model->Omega);
        put_optional(m, "kappa", cfg.model->kappa);
        put_optional(m, "g", cfg.model->g);
        put_optional(m, "lambda", cfg.model->lambda);
        put_optional(m, "delta", cfg.model->delta);
        j["model"] = m;
    }
    j["damping"] = {{"gamma_a", cfg.damping.gamma_a},
                    {"gamma_b", cfg.damping.gamma_b},
                    {"gamma_qubit", cfg.damping.gamma_qubit}};
    j["initial"] = {{"alpha0_re", cfg.initial.alpha0.real()},
                    {"alpha0_im", cfg.initial.alpha0.imag()},
                    {"beta0_re", cfg.initial.beta0.real()},
                    {"beta0_im", cfg.initial.beta0.imag()}};
    j["time"] = {{"t_max", cfg.time.t_max}, {"n_points", cfg.time.n_points}};
    if (cfg.oracle) {
        j["oracle"] = {{"n_a", cfg.oracle->n_a}, {"n_b", cfg.oracle->n_b}, {"dt", cfg.oracle->dt}};
    }
    j["outputs"] = json::array();
    for (const auto kind : cfg.outputs) j["outputs"].push_back(std::string(to_string(kind)));
    return j;
}

ScenarioConfig parse_config_text(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

ScenarioConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

EffectiveModel resolve_model(const ScenarioConfig& cfg)
{
    if (cfg.mode == ParameterMode::device_units) {
        const auto raw = resolve_couplings(cfg);
        return effective_model(raw.g, raw.lambda, cfg.device->delta);
    }
    const auto& m = *cfg.model;
    if (m.chi) return EffectiveModel::from_constants(*m.chi, *m.Omega, *m.kappa);
    return effective_model(*m.g, *m.lambda, *m.delta);
}

RawCouplings resolve_couplings(const ScenarioConfig& cfg)
{
    if (!cfg.device) throw ConfigError("couplings need a 'device' section (device-units mode)");
    return raw_couplings(*cfg.device);
}

} // namespace nemscat
