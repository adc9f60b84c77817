#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nemscat/coherent.hpp"
#include "nemscat/ode.hpp"

namespace nemscat {

/// Zero-temperature loss rates of the two modes, plus an optional pure qubit
/// decoherence rate applied as exp(-gamma_qubit t) on f.
struct DampingParams {
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double gamma_qubit = 0.0;

    static DampingParams make(double gamma_a, double gamma_b, double gamma_qubit = 0.0);

    /// (gamma_a + gamma_b) / 4
    double gamma_plus() const { return 0.25 * (gamma_a + gamma_b); }
    bool lossless() const { return gamma_a == 0.0 && gamma_b == 0.0; }

    bool operator==(const DampingParams&) const = default;
};

/// w = sqrt(4 kappa^2 - (gamma_a - gamma_b + 2i Delta)^2 / 4), principal branch.
cplx mode_splitting(const EffectiveModel& model, const DampingParams& damping);

/// Eigenmode decomposition of one damped branch:
///   alpha(t) = U e^{rate_u t} + V e^{rate_v t},  beta(t) = X e^{rate_u t} + Y e^{rate_v t}.
/// For the minus branch rate_u = -(gamma_+ - i(omega - w/2)), rate_v = -(gamma_+ - i(omega + w/2)).
/// The plus branch uses the same construction with the Hamiltonian sign flipped.
struct ModeCoefficients {
    cplx U{}, V{}, X{}, Y{};
    cplx w{};
    cplx rate_u{}, rate_v{};
    bool degenerate = false; // |w| < 1e-14, decomposition unusable
};

/// Coefficients for a given splitting `w`. Passing -w swaps (U, V) and (X, Y).
ModeCoefficients mode_coefficients(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, Branch branch, cplx w);
ModeCoefficients mode_coefficients(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, Branch branch);

ModePair evaluate(const ModeCoefficients& c, double t);

/// d(alpha, beta)/dt = (-/+ i M - Gamma/2)(alpha, beta) for the plus/minus branch.
ModePair damped_ode_rhs(const ModePair& state, Branch branch, const EffectiveModel& model,
                        const DampingParams& damping);

struct DampedAmplitudes {
    ModePair value;
    bool used_fallback = false; // degenerate generator, integrated numerically instead
};

DampedAmplitudes damped_amplitudes_closed(const InitialAmplitudes& init,
                                          const EffectiveModel& model,
                                          const DampingParams& damping, double t, Branch branch);

/// Numerical solution of the damped branch equations (adaptive RK4).
ModePair damped_amplitudes_numeric(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, double t, Branch branch,
                                   const ode::AdaptiveOptions& opts = {});

struct TrajectoryPoint {
    double t = 0.0;
    cplx alpha{};
    cplx beta{};
};

/// Max over interior grid points of |d/dt(|alpha|^2 + |beta|^2) + gamma_a|alpha|^2 + gamma_b|beta|^2|
/// with the derivative taken by central differences. Requires a uniform grid of >= 3 points.
double energy_decay_check(std::span<const TrajectoryPoint> trajectory,
                          const DampingParams& damping);

/// Instantaneous decoherence rate d(log f)/dt:
///   gamma_a (alpha_- conj(alpha_+) - (|alpha_-|^2 + |alpha_+|^2)/2) + (same for b).
/// When the branches are complex conjugates (real initial amplitudes) this is exactly
///   gamma_a (alpha_- conj(alpha_+) - |alpha_-|^2) + gamma_b (beta_- conj(beta_+) - |beta_-|^2).
cplx decoherence_rate(const ModePair& minus, const ModePair& plus, const DampingParams& damping);

cplx decoherence_G(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                   const DampingParams& damping);

/// gamma_a alpha_-^2 + gamma_b beta_-^2 + d/dt(|alpha_-|^2 + |beta_-|^2), the form that
/// relies on the branch conjugation relation.
cplx decoherence_G_alternate(double t, const InitialAmplitudes& init,
                             const EffectiveModel& model, const DampingParams& damping);

struct DecoherenceRecord {
    double t = 0.0;
    cplx f{1.0, 0.0};
    cplx log_f{};
    std::optional<cplx> f_short_time;
};

enum class FMethod { closed, quadrature };

struct QuadratureOptions {
    ode::AdaptiveOptions adaptive{1e-10, 1e-13, 1e-3, 1e-13, 50'000'000};
};

/// log f from the eigenmode coefficients of the minus branch:
///   gamma_a [x_+ U^2 + x_- V^2 + 2 U V y] + gamma_b [x_+ X^2 + x_- Y^2 + 2 X Y y]
///   + (|alpha_-(t)|^2 - |alpha_0|^2) + (|beta_-(t)|^2 - |beta_0|^2).
/// Valid when the branches are conjugate, i.e. for real initial amplitudes.
cplx log_f_conjugate_branches(const ModeCoefficients& minus, const InitialAmplitudes& init,
                              const DampingParams& damping, double t);

/// log f for arbitrary complex initial amplitudes: integrates the products of both
/// branches' eigenmodes in closed form.
cplx log_f_two_branch(const ModeCoefficients& minus, const ModeCoefficients& plus,
                      const InitialAmplitudes& init, const DampingParams& damping, double t);

DecoherenceRecord decoherence_f(double t, const InitialAmplitudes& init,
                                const EffectiveModel& model, const DampingParams& damping,
                                FMethod method, const QuadratureOptions& quad = {});

/// f on an increasing time grid. The quadrature method integrates once along the grid.
std::vector<DecoherenceRecord> decoherence_trajectory(std::span<const double> grid,
                                                      const InitialAmplitudes& init,
                                                      const EffectiveModel& model,
                                                      const DampingParams& damping,
                                                      FMethod method,
                                                      const QuadratureOptions& quad = {});

/// Symmetric-case closed form (chi = Omega = kappa, gamma_a = gamma_b = gamma, alpha0 = 0, beta0 = B):
///   f = exp[-(B^2/2)(1 - e^{-gamma t}) + (gamma B^2/2)(1 - e^{-gamma t + 4i kappa t})/(gamma - 4i kappa)]
cplx symmetric_case_f(double t, double B, double kappa, double gamma);

/// Leading short-time behaviour of the symmetric case:
///   f = exp[-(4B^2/3) gamma kappa^2 t^3 + i B^2 kappa gamma t^2].
cplx short_time_f(double t, double B, double kappa, double gamma);

/// 1/2 [1 + Re(f <alpha_+|alpha_-> <beta_+|beta_->)]
double p_minus_dissipative(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                           const DampingParams& damping);
double p_minus_dissipative(const DecoherenceRecord& record, const ModePair& minus,
                           const ModePair& plus);

/// Re f(t)
double sigma_x_expectation(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                           const DampingParams& damping);

namespace detail {
/// (e^{s t} - 1) / s, continuous through s = 0.
cplx exp_integral(cplx s, double t);
} // namespace detail

} // namespace nemscat
