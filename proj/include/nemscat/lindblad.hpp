#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nemscat/dissipative.hpp"

namespace nemscat {

using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using StateVector = Eigen::VectorXcd;

/// Probability mass of |amplitude> outside the first `levels` Fock states.
double coherent_leakage(double amplitude, int levels);

/// Fock cutoffs for the cavity (n_a) and the resonator (n_b). Joint basis index is
/// i_a * n_b + i_b, so the cavity index varies slower.
struct FockTruncation {
    int n_a = 0;
    int n_b = 0;

    /// Validates cutoffs >= 2 and leakage < 1e-8 for a coherent state of |max_amplitude|
    /// in each mode; throws NumericalGateError otherwise.
    static FockTruncation make(int n_a, int n_b, double max_amplitude);

    int dim() const { return n_a * n_b; }
};

/// Truncated single-mode annihilation operator, <n-1|a|n> = sqrt(n).
DenseMatrix annihilation(int levels);

struct ModeOperators {
    SparseMatrix a;       // a (x) 1
    SparseMatrix b;       // 1 (x) b
    SparseMatrix n_a;     // a^dag a
    SparseMatrix n_b;     // b^dag b
    SparseMatrix hopping; // a b^dag + a^dag b
};

ModeOperators mode_operators(const FockTruncation& trunc);

struct CoherentVector {
    StateVector v;       // renormalized to unit norm
    double raw_norm = 1; // norm of the truncated expansion before renormalization
};

/// Truncated coherent state; throws NumericalGateError when leakage exceeds 1e-6.
CoherentVector coherent_vector(cplx amplitude, int levels);

/// |alpha>_a (x) |beta>_b in the joint truncated basis.
StateVector product_state(cplx alpha, cplx beta, const FockTruncation& trunc);

/// The four qubit sectors of the joint density matrix, each evolved with unit-trace
/// initial condition |alpha0, beta0><alpha0, beta0|. `mp` is the |-><+| sector.
struct LindbladBlocks {
    double t = 0.0;
    DenseMatrix pp, mm, pm, mp;
};

struct OracleOptions {
    double dt = 0.0025;
    bool step_doubling_gate = true;
    double gate_tolerance = 1e-6;
};

/// Integrates d rho_ss'/dt = -i(H_s rho - rho H_s') + gamma_a D[a]rho + gamma_b D[b]rho,
/// H_+- = +-(chi a^dag a + Omega b^dag b + kappa(a b^dag + a^dag b)), with fixed-step RK4.
/// Off-diagonal sectors additionally decay at gamma_qubit. `observer` is called at every
/// grid point in order. Grid must be non-negative and strictly increasing.
void evolve_blocks(const InitialAmplitudes& init, const EffectiveModel& model,
                   const DampingParams& damping, const FockTruncation& trunc,
                   std::span<const double> grid, const OracleOptions& options,
                   const std::function<void(const LindbladBlocks&)>& observer);

std::vector<LindbladBlocks> evolve_blocks(const InitialAmplitudes& init,
                                          const EffectiveModel& model,
                                          const DampingParams& damping,
                                          const FockTruncation& trunc,
                                          std::span<const double> grid,
                                          const OracleOptions& options = {});

/// f = <alpha_-, beta_-| rho_mp |alpha_+, beta_+>.
cplx extract_f(const LindbladBlocks& blocks, const ModePair& minus, const ModePair& plus,
               const FockTruncation& trunc);

/// 1/2 (1 + Re tr rho_mp).
double p_minus_numeric(const LindbladBlocks& blocks);

struct OracleRow {
    double t = 0.0;
    cplx f_numeric{};
    cplx f_closed{};
    double p_minus_numeric = 0.0;
    double p_minus_closed = 0.0;
    double fidelity_pp = 0.0;
    double fidelity_mm = 0.0;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    double max_trace_drift = 0.0;       // |tr rho_pp - 1|, |tr rho_mm - 1|
    double max_hermiticity_drift = 0.0; // diagonal sectors
    double max_adjoint_drift = 0.0;     // |rho_mp - rho_pm^dag|
    double min_eigenvalue = 0.0;        // diagonal sectors, at checkpoints
};

/// Runs the master equation and compares it with the coherent-state ansatz predictions.
OracleReport run_oracle(const InitialAmplitudes& init, const EffectiveModel& model,
                        const DampingParams& damping, const FockTruncation& trunc,
                        std::span<const double> grid, const OracleOptions& options = {});

} // namespace nemscat
