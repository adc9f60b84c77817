#include "nemscat/physical_params.hpp"

#include <cmath>
#include <string>

#include "nemscat/errors.hpp"

namespace nemscat {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be finite and strictly positive, got " +
                          std::to_string(value));
    }
}

void require_charge_cell(double n_g0)
{
    if (!(n_g0 >= 0.0 && n_g0 <= 1.0)) {
        throw DomainError("n_g0 must lie in [0, 1], got " + std::to_string(n_g0));
    }
}

double charge_bias(double E_C, double n_g0) { return 4.0 * E_C * (1.0 - 2.0 * n_g0); }

} // namespace

void DeviceParams::validate() const
{
    require_positive(E_C, "E_C");
    require_positive(E_J, "E_J");
    require_charge_cell(n_g0);
    require_positive(C_g, "C_g");
    require_positive(C_Sigma, "C_Sigma");
    require_positive(L, "L");
    require_positive(c, "c");
    require_positive(omega_r, "omega_r");
    require_positive(nu, "nu");
    require_positive(m, "m");
    require_positive(d, "d");
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw DomainError("delta must be finite and non-zero (dispersive regime)");
    }
    if (g) require_positive(*g, "g");
}

EffectiveModel EffectiveModel::from_constants(double chi, double Omega, double kappa)
{
    if (!std::isfinite(chi) || !std::isfinite(Omega) || !std::isfinite(kappa)) {
        throw DomainError("effective model constants must be finite");
    }
    EffectiveModel m;
    m.chi = chi;
    m.Omega = Omega;
    m.kappa = kappa;
    m.omega_bar = 0.5 * (Omega + chi);
    m.Delta = Omega - chi;
    m.R = std::hypot(m.Delta, 2.0 * kappa);
    return m;
}

double x_rms(double m, double nu)
{
    require_positive(m, "m");
    require_positive(nu, "nu");
    return std::sqrt(constants::hbar / (2.0 * m * nu));
}

double cpb_gap(double E_C, double E_J, double n_g0)
{
    if (E_C < 0.0 || E_J < 0.0) throw DomainError("E_C and E_J must be non-negative");
    require_charge_cell(n_g0);
    return std::hypot(E_J, charge_bias(E_C, n_g0));
}

double mixing_angle(double E_C, double E_J, double n_g0)
{
    if (E_C < 0.0 || E_J < 0.0) throw DomainError("E_C and E_J must be non-negative");
    require_charge_cell(n_g0);
    const double bias = charge_bias(E_C, n_g0);
    if (E_J == 0.0 && bias == 0.0) {
        throw DomainError("mixing angle undefined: E_J and 4 E_C (1 - 2 n_g0) both vanish");
    }
    // atan2 with E_J >= 0 lands in [0, pi], giving pi/2 at n_g0 = 1/2.
    return std::atan2(E_J, bias);
}

double cavity_coupling(const DeviceParams& p)
{
    require_positive(p.C_g, "C_g");
    require_positive(p.C_Sigma, "C_Sigma");
    require_positive(p.omega_r, "omega_r");
    if (!(p.L * p.c > 0.0)) throw DomainError("L c must be strictly positive");
    const double hbar_g = constants::elementary_charge * (p.C_g / p.C_Sigma) *
                          std::sqrt(constants::hbar * p.omega_r / (p.L * p.c));
    return hbar_g / constants::hbar;
}

double resonator_coupling(double E_C, double x_rms_value, double d)
{
    require_positive(d, "d");
    if (x_rms_value < 0.0) throw DomainError("x_rms must be non-negative");
    return 2.0 * (E_C / constants::hbar) * (x_rms_value / d);
}

double cross_coupling(double g, double x_rms_value, double d)
{
    require_positive(d, "d");
    if (x_rms_value < 0.0) throw DomainError("x_rms must be non-negative");
    return g * x_rms_value / d;
}

RawCouplings raw_couplings(const DeviceParams& p)
{
    p.validate();
    RawCouplings out;
    out.x_rms = x_rms(p.m, p.nu);
    out.g = p.g ? *p.g : cavity_coupling(p);
    out.lambda = resonator_coupling(p.E_C, out.x_rms, p.d);
    out.chi_cross = cross_coupling(out.g, out.x_rms, p.d);
    out.epsilon = cpb_gap(p.E_C, p.E_J, p.n_g0);
    out.theta = mixing_angle(p.E_C, p.E_J, p.n_g0);
    return out;
}

EffectiveModel effective_model(double g, double lambda, double delta,
                               const ModelOverrides& overrides)
{
    const int given = int(overrides.chi.has_value()) + int(overrides.Omega.has_value()) +
                      int(overrides.kappa.has_value());
    if (given == 3) {
        return EffectiveModel::from_constants(*overrides.chi, *overrides.Omega, *overrides.kappa);
    }
    if (given != 0) {
        throw ConfigError("model overrides must supply all of chi, Omega and kappa, or none");
    }
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw DomainError("delta must be finite and non-zero (dispersive regime)");
    }
    return EffectiveModel::from_constants(g * g / delta, lambda * lambda / delta,
                                          g * lambda / delta);
}

} // namespace nemscat
