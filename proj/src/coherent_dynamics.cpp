#include "nemscat/coherent.hpp"

#include <algorithm>
#include <cmath>

namespace nemscat {

namespace {

constexpr cplx I{0.0, 1.0};

cplx phase(double angle) { return std::polar(1.0, angle); }

ModePair evolve_forward(const InitialAmplitudes& init, const EffectiveModel& model, double t)
{
    const cplx a0 = init.alpha0;
    const cplx b0 = init.beta0;
    const double w = model.omega_bar;
    const double D = model.Delta;
    const double R = model.R;
    const double k = model.kappa;

    if (R == 0.0) {
        // kappa = Delta = 0: both modes rotate at the common frequency.
        const cplx p = phase(-w * t);
        return {a0 * p, b0 * p};
    }

    const double c = std::cos(R * t / 2.0);
    const double s = std::sin(R * t / 2.0);
    const cplx carrier = phase(-w * t);

    const cplx alpha = carrier * (a0 * c - I * s * (2.0 * k * b0 - D * a0) / R);
    const cplx beta = carrier * (b0 * c - I * s * (2.0 * k * a0 + D * b0) / R);
    return {alpha, beta};
}

} // namespace

cplx coherent_overlap(cplx a, cplx b)
{
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

ModePair evolve_amplitudes(const InitialAmplitudes& init, const EffectiveModel& model, double t,
                           Branch branch)
{
    return evolve_forward(init, model, branch == Branch::plus ? t : -t);
}

BranchState branch_state(const InitialAmplitudes& init, const EffectiveModel& model, double t)
{
    const auto plus = evolve_amplitudes(init, model, t, Branch::plus);
    const auto minus = evolve_amplitudes(init, model, t, Branch::minus);
    return {t, plus.alpha, plus.beta, minus.alpha, minus.beta};
}

double p_minus(const InitialAmplitudes& init, const EffectiveModel& model, double t)
{
    const auto s = branch_state(init, model, t);
    const double separation =
        std::norm(s.alpha_plus - s.alpha_minus) + std::norm(s.beta_plus - s.beta_minus);
    const double phi = std::imag(std::conj(s.alpha_plus) * s.alpha_minus +
                                 std::conj(s.beta_plus) * s.beta_minus);
    const double p = 0.5 * (1.0 + std::exp(-0.5 * separation) * std::cos(phi));
    return std::clamp(p, 0.0, 1.0);
}

double interference_phase(const InitialAmplitudes& init, const EffectiveModel& model, double t)
{
    const auto s = branch_state(init, model, t);
    return std::imag(std::conj(s.alpha_plus) * s.alpha_minus +
                     std::conj(s.beta_plus) * s.beta_minus);
}

ModePair symmetric_case_amplitudes(double B, double kappa, double t)
{
    const cplx carrier = phase(-kappa * t);
    return {-I * B * carrier * std::sin(kappa * t), B * carrier * std::cos(kappa * t)};
}

} // namespace nemscat
