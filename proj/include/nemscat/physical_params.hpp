#pragma once

#include <optional>

namespace nemscat {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
} // namespace constants

/// Raw device description in SI units. Frequencies are angular (rad/s).
struct DeviceParams {
    double E_C = 0.0;      // charging energy (J)
    double E_J = 0.0;      // Josephson energy (J)
    double n_g0 = 0.5;     // DC gate charge
    double C_g = 0.0;      // gate capacitance (F)
    double C_Sigma = 0.0;  // island capacitance (F)
    double L = 0.0;        // resonator inductance (H)
    double c = 0.0;        // resonator capacitance (F)
    double omega_r = 0.0;  // cavity frequency
    double nu = 0.0;       // mechanical frequency
    double m = 0.0;        // resonator mass (kg)
    double d = 0.0;        // gate distance scale (m)
    double delta = 0.0;    // qubit detuning, may be negative

    // Cavity coupling supplied directly, bypassing the lumped-circuit formula.
    std::optional<double> g;

    /// Throws DomainError naming the offending field.
    void validate() const;

    bool operator==(const DeviceParams&) const = default;
};

struct RawCouplings {
    double g = 0.0;         // cavity-qubit coupling (rad/s)
    double lambda = 0.0;    // resonator-qubit coupling (rad/s)
    double chi_cross = 0.0; // cross term g x_rms / d (rad/s)
    double x_rms = 0.0;     // m
    double epsilon = 0.0;   // qubit gap (J)
    double theta = 0.0;     // mixing angle (rad)
};

/// Dispersive-regime constants and the derived spectral quantities of the
/// 2x2 mode generator [[chi, kappa], [kappa, Omega]].
struct EffectiveModel {
    double chi = 0.0;
    double Omega = 0.0;
    double kappa = 0.0;
    double omega_bar = 0.0; // (Omega + chi) / 2
    double Delta = 0.0;     // Omega - chi
    double R = 0.0;         // sqrt(Delta^2 + 4 kappa^2)

    /// Builds the model from chi, Omega, kappa given directly (dimensionless mode).
    static EffectiveModel from_constants(double chi, double Omega, double kappa);

    bool operator==(const EffectiveModel&) const = default;
};

struct ModelOverrides {
    std::optional<double> chi;
    std::optional<double> Omega;
    std::optional<double> kappa;
};

/// Ground-state rms displacement sqrt(hbar / (2 m nu)).
double x_rms(double m, double nu);

/// Qubit gap sqrt(E_J^2 + [4 E_C (1 - 2 n_g0)]^2).
double cpb_gap(double E_C, double E_J, double n_g0);

/// Mixing angle in [0, pi]; pi/2 at the charge degeneracy point.
double mixing_angle(double E_C, double E_J, double n_g0);

/// hbar g = e (C_g / C_Sigma) sqrt(hbar omega_r / (L c)), returned as g in rad/s.
/// The formula is used as written on lumped L and c.
double cavity_coupling(const DeviceParams& p);

/// lambda = 2 (E_C / hbar) (x_rms / d).
double resonator_coupling(double E_C, double x_rms, double d);

/// chi_cross = g x_rms / d.
double cross_coupling(double g, double x_rms, double d);

RawCouplings raw_couplings(const DeviceParams& p);

/// chi = g^2/delta, Omega = lambda^2/delta, kappa = g lambda/delta unless all three
/// overrides are present. Partial overrides are a ConfigError.
EffectiveModel effective_model(double g, double lambda, double delta,
                               const ModelOverrides& overrides = {});

} // namespace nemscat
