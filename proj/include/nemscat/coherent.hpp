#pragma once

#include <complex>

#include "nemscat/physical_params.hpp"

namespace nemscat {

using cplx = std::complex<double>;

/// Qubit-conditioned branch: plus evolves under exp(-iHt), minus under exp(+iHt).
enum class Branch { plus, minus };

/// Coherent amplitudes of the cavity (a) and the mechanical resonator (b) at t = 0.
struct InitialAmplitudes {
    cplx alpha0{};
    cplx beta0{};

    double excitation() const { return std::norm(alpha0) + std::norm(beta0); }
    bool is_real() const { return alpha0.imag() == 0.0 && beta0.imag() == 0.0; }

    bool operator==(const InitialAmplitudes&) const = default;
};

struct ModePair {
    cplx alpha{};
    cplx beta{};
};

struct BranchState {
    double t = 0.0;
    cplx alpha_plus{}, beta_plus{};
    cplx alpha_minus{}, beta_minus{};
};

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b). Every visibility formula goes through this.
cplx coherent_overlap(cplx a, cplx b);

/// Lossless amplitudes. The plus branch is exp(-iMt)(alpha0, beta0) with
/// M = [[chi, kappa], [kappa, Omega]]; the minus branch is the same at -t.
ModePair evolve_amplitudes(const InitialAmplitudes& init, const EffectiveModel& model, double t,
                           Branch branch);

BranchState branch_state(const InitialAmplitudes& init, const EffectiveModel& model, double t);

/// Probability of reading the qubit in |-> after the second pi/2 pulse.
double p_minus(const InitialAmplitudes& init, const EffectiveModel& model, double t);

/// Phi(t) = Im{conj(alpha(t)) alpha(-t) + conj(beta(t)) beta(-t)}.
double interference_phase(const InitialAmplitudes& init, const EffectiveModel& model, double t);

/// chi = Omega = kappa, alpha0 = 0, beta0 = B: alpha = -iB e^{-i kappa t} sin(kappa t),
/// beta = B e^{-i kappa t} cos(kappa t).
ModePair symmetric_case_amplitudes(double B, double kappa, double t);

} // namespace nemscat
