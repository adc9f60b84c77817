#include "nemscat/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "nemscat/errors.hpp"
#include "nemscat/parallel.hpp"

namespace nemscat {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kConstructionLeakage = 1e-8;
constexpr double kVectorLeakage = 1e-6;

SparseMatrix from_triplets(int dim, const std::vector<Eigen::Triplet<cplx>>& triplets)
{
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

/// Right-hand side of the four sector equations. Sector index 0 is +, 1 is -.
/// Right-hand side of one qubit sector, applied element-wise through precomputed
/// Fock-neighbour tables rather than matrix products.
class SectorGenerator {
public:
    SectorGenerator(const EffectiveModel& model, const DampingParams& damping,
                    const FockTruncation& trunc)
        : dim_(trunc.dim()), kappa_(model.kappa), gamma_a_(damping.gamma_a),
          gamma_b_(damping.gamma_b), gamma_q_(damping.gamma_qubit)
    {
        const int na = trunc.n_a;
        const int nb = trunc.n_b;
        auto index = [nb](int ia, int ib) { return ia * nb + ib; };
        energy_.resize(dim_);
        loss_.resize(dim_);
        hop_.resize(dim_);
        up_a_.resize(dim_);
        up_b_.resize(dim_);
        for (int ia = 0; ia < na; ++ia) {
            for (int ib = 0; ib < nb; ++ib) {
                const int i = index(ia, ib);
                energy_[i] = model.chi * ia + model.Omega * ib;
                loss_[i] = 0.5 * (gamma_a_ * ia + gamma_b_ * ib);
                auto& h = hop_[i];
                if (ia > 0 && ib + 1 < nb) {
                    h[0] = {index(ia - 1, ib + 1), std::sqrt(double(ia) * double(ib + 1))};
                }
                if (ia + 1 < na && ib > 0) {
                    h[1] = {index(ia + 1, ib - 1), std::sqrt(double(ia + 1) * double(ib))};
                }
                if (ia + 1 < na) up_a_[i] = {index(ia + 1, ib), std::sqrt(double(ia + 1))};
                if (ib + 1 < nb) up_b_[i] = {index(ia, ib + 1), std::sqrt(double(ib + 1))};
            }
        }
    }

    /// out = L_{s s'}(rho); `out` must not alias `rho`.
    void apply(int s, int sp, const DenseMatrix& rho, DenseMatrix& out) const
    {
        const double sign_s = s == 0 ? 1.0 : -1.0;
        const double sign_sp = sp == 0 ? 1.0 : -1.0;
        const double dephase = s != sp ? gamma_q_ : 0.0;
        const cplx ket_hop = -I * sign_s * kappa_;
        const cplx bra_hop = I * sign_sp * kappa_;
        out.resize(dim_, dim_);

        for (int j = 0; j < dim_; ++j) {
            const cplx kj{-loss_[j] - dephase, sign_sp * energy_[j]};
            const cplx* rc = rho.data() + static_cast<std::ptrdiff_t>(j) * dim_;
            cplx* oc = out.data() + static_cast<std::ptrdiff_t>(j) * dim_;
            for (int i = 0; i < dim_; ++i) {
                cplx acc = cplx{-loss_[i], -sign_s * energy_[i]} * rc[i] + kj * rc[i];
                cplx hop{};
                for (const auto& [k, amp] : hop_[i]) {
                    if (k >= 0) hop += amp * rc[k];
                }
                oc[i] = acc + ket_hop * hop;
            }
            for (const auto& [k, amp] : hop_[j]) {
                if (k < 0) continue;
                const cplx c = bra_hop * amp;
                const cplx* rk = rho.data() + static_cast<std::ptrdiff_t>(k) * dim_;
                for (int i = 0; i < dim_; ++i) oc[i] += c * rk[i];
            }
            add_jump(gamma_a_, up_a_, j, rho, oc);
            add_jump(gamma_b_, up_b_, j, rho, oc);
        }
    }

private:
    struct Link {
        int index = -1;
        double amp = 0.0;
    };

    void add_jump(double gamma, const std::vector<Link>& up, int j, const DenseMatrix& rho,
                  cplx* oc) const
    {
        if (gamma == 0.0 || up[j].index < 0) return;
        const double cj = gamma * up[j].amp;
        const cplx* rk = rho.data() + static_cast<std::ptrdiff_t>(up[j].index) * dim_;
        for (int i = 0; i < dim_; ++i) {
            if (up[i].index >= 0) oc[i] += (cj * up[i].amp) * rk[up[i].index];
        }
    }

    int dim_;
    double kappa_, gamma_a_, gamma_b_, gamma_q_;
    std::vector<double> energy_, loss_;
    std::vector<std::array<Link, 2>> hop_;
    std::vector<Link> up_a_, up_b_;
};

struct Sector {
    int s;
    int sp;
};
constexpr std::array<Sector, 4> kSectors{{{0, 0}, {1, 1}, {0, 1}, {1, 0}}};

template <class Blocks>
auto& sector_of(Blocks& blocks, std::size_t i)
{
    switch (i) {
    case 0: return blocks.pp;
    case 1: return blocks.mm;
    case 2: return blocks.pm;
    default: return blocks.mp;
    }
}

DenseMatrix rk4_segment(const SectorGenerator& gen, Sector sector, DenseMatrix rho, double t0,
                        double t1, double dt)
{
    const double span = t1 - t0;
    if (span <= 0.0) return rho;
    const auto steps = static_cast<long>(std::max(1.0, std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    DenseMatrix k1, k2, k3, k4, tmp;
    for (long n = 0; n < steps; ++n) {
        gen.apply(sector.s, sector.sp, rho, k1);
        tmp.noalias() = rho + (0.5 * h) * k1;
        gen.apply(sector.s, sector.sp, tmp, k2);
        tmp.noalias() = rho + (0.5 * h) * k2;
        gen.apply(sector.s, sector.sp, tmp, k3);
        tmp.noalias() = rho + h * k3;
        gen.apply(sector.s, sector.sp, tmp, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

void advance_all(const SectorGenerator& gen, LindbladBlocks& blocks, double t1, double dt)
{
    const double t0 = blocks.t;
    parallel_for(kSectors.size(), std::min<std::size_t>(worker_count(), kSectors.size()),
                 [&](std::size_t i) {
                     auto& rho = sector_of(blocks, i);
                     rho = rk4_segment(gen, kSectors[i], std::move(rho), t0, t1, dt);
                 });
    blocks.t = t1;
}

void step_doubling_gate(const SectorGenerator& gen, const LindbladBlocks& start, double t1,
                        const OracleOptions& options)
{
    std::array<double, 4> change{};
    parallel_for(kSectors.size(), std::min<std::size_t>(worker_count(), kSectors.size()),
                 [&](std::size_t i) {
                     const auto& rho = sector_of(start, i);
                     const DenseMatrix coarse =
                         rk4_segment(gen, kSectors[i], rho, start.t, t1, options.dt);
                     const DenseMatrix fine =
                         rk4_segment(gen, kSectors[i], rho, start.t, t1, 0.5 * options.dt);
                     change[i] = (coarse - fine).cwiseAbs().maxCoeff();
                 });
    const double worst = *std::max_element(change.begin(), change.end());
    if (worst >= options.gate_tolerance) {
        // RK4 global error ~ dt^4; aim a factor of ten under the tolerance.
        const double suggested =
            options.dt * 0.8 * std::pow(options.gate_tolerance / (10.0 * worst), 0.25);
        std::ostringstream msg;
        msg << "step-doubling gate failed: halving dt=" << options.dt
            << " changed the blocks by " << worst << " (limit " << options.gate_tolerance
            << "); try dt <= " << suggested;
        throw NumericalGateError(msg.str());
    }
}

double min_hermitian_eigenvalue(const DenseMatrix& rho)
{
    const DenseMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

} // namespace

double coherent_leakage(double amplitude, int levels)
{
    const double x = amplitude * amplitude;
    if (levels <= 0) return 1.0;
    if (x == 0.0) return 0.0;
    // Poisson tail P(n >= levels), summed upward from the first omitted term.
    double term = std::exp(-x + levels * std::log(x) - std::lgamma(levels + 1.0));
    double tail = 0.0;
    for (int k = levels; k < levels + 10000; ++k) {
        tail += term;
        term *= x / (k + 1.0);
        if (term < 1e-18 * tail && k > x) break;
    }
    return std::min(tail, 1.0);
}

FockTruncation FockTruncation::make(int n_a, int n_b, double max_amplitude)
{
    if (n_a < 2 || n_b < 2) throw ConfigError("Fock cutoffs must be >= 2");
    for (const int n : {n_a, n_b}) {
        const double leak = coherent_leakage(max_amplitude, n);
        if (leak >= kConstructionLeakage) {
            std::ostringstream msg;
            msg << "Fock cutoff " << n << " too small for amplitude " << max_amplitude
                << ": leakage " << leak << " >= " << kConstructionLeakage;
            throw NumericalGateError(msg.str());
        }
    }
    return {n_a, n_b};
}

DenseMatrix annihilation(int levels)
{
    DenseMatrix a = DenseMatrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ModeOperators mode_operators(const FockTruncation& trunc)
{
    const int na = trunc.n_a;
    const int nb = trunc.n_b;
    const int dim = trunc.dim();
    auto index = [nb](int ia, int ib) { return ia * nb + ib; };

    std::vector<Eigen::Triplet<cplx>> a, b, num_a, num_b, hop;
    for (int ia = 0; ia < na; ++ia) {
        for (int ib = 0; ib < nb; ++ib) {
            const int col = index(ia, ib);
            if (ia > 0) a.emplace_back(index(ia - 1, ib), col, std::sqrt(double(ia)));
            if (ib > 0) b.emplace_back(index(ia, ib - 1), col, std::sqrt(double(ib)));
            num_a.emplace_back(col, col, double(ia));
            num_b.emplace_back(col, col, double(ib));
            // a b^dag: |ia, ib> -> sqrt(ia (ib+1)) |ia-1, ib+1>, and its adjoint
            if (ia > 0 && ib + 1 < nb) {
                const double amp = std::sqrt(double(ia) * double(ib + 1));
                hop.emplace_back(index(ia - 1, ib + 1), col, amp);
                hop.emplace_back(col, index(ia - 1, ib + 1), amp);
            }
        }
    }
    return {from_triplets(dim, a), from_triplets(dim, b), from_triplets(dim, num_a),
            from_triplets(dim, num_b), from_triplets(dim, hop)};
}

CoherentVector coherent_vector(cplx amplitude, int levels)
{
    if (levels < 1) throw ConfigError("coherent_vector needs at least one level");
    const double leak = coherent_leakage(std::abs(amplitude), levels);
    if (leak > kVectorLeakage) {
        std::ostringstream msg;
        msg << "cutoff too small: coherent amplitude " << std::abs(amplitude) << " leaks " << leak
            << " outside " << levels << " Fock levels";
        throw NumericalGateError(msg.str());
    }
    StateVector v(levels);
    v[0] = std::exp(-0.5 * std::norm(amplitude));
    for (int n = 1; n < levels; ++n) v[n] = v[n - 1] * amplitude / std::sqrt(double(n));
    CoherentVector out;
    out.raw_norm = v.norm();
    out.v = v / out.raw_norm;
    return out;
}

StateVector product_state(cplx alpha, cplx beta, const FockTruncation& trunc)
{
    const auto va = coherent_vector(alpha, trunc.n_a).v;
    const auto vb = coherent_vector(beta, trunc.n_b).v;
    StateVector out(trunc.dim());
    for (int ia = 0; ia < trunc.n_a; ++ia) {
        out.segment(ia * trunc.n_b, trunc.n_b) = va[ia] * vb;
    }
    return out;
}

void evolve_blocks(const InitialAmplitudes& init, const EffectiveModel& model,
                   const DampingParams& damping, const FockTruncation& trunc,
                   std::span<const double> grid, const OracleOptions& options,
                   const std::function<void(const LindbladBlocks&)>& observer)
{
    if (!(options.dt > 0.0)) throw ConfigError("oracle dt must be positive");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("oracle time grid must be non-negative and strictly increasing");
        }
    }

    const SectorGenerator gen(model, damping, trunc);
    const StateVector psi0 = product_state(init.alpha0, init.beta0, trunc);
    const DenseMatrix projector = psi0 * psi0.adjoint();
    LindbladBlocks blocks{0.0, projector, projector, projector, projector};

    bool gated = !options.step_doubling_gate;
    for (const double t : grid) {
        if (t > blocks.t) {
            if (!gated) {
                step_doubling_gate(gen, blocks, t, options);
                gated = true;
            }
            advance_all(gen, blocks, t, options.dt);
        }
        observer(blocks);
    }
}

std::vector<LindbladBlocks> evolve_blocks(const InitialAmplitudes& init,
                                          const EffectiveModel& model,
                                          const DampingParams& damping,
                                          const FockTruncation& trunc,
                                          std::span<const double> grid,
                                          const OracleOptions& options)
{
    std::vector<LindbladBlocks> out;
    out.reserve(grid.size());
    evolve_blocks(init, model, damping, trunc, grid, options,
                  [&](const LindbladBlocks& b) { out.push_back(b); });
    return out;
}

cplx extract_f(const LindbladBlocks& blocks, const ModePair& minus, const ModePair& plus,
               const FockTruncation& trunc)
{
    const StateVector ket_minus = product_state(minus.alpha, minus.beta, trunc);
    const StateVector ket_plus = product_state(plus.alpha, plus.beta, trunc);
    return ket_minus.dot(blocks.mp * ket_plus);
}

double p_minus_numeric(const LindbladBlocks& blocks)
{
    return 0.5 * (1.0 + std::real(blocks.mp.trace()));
}

OracleReport run_oracle(const InitialAmplitudes& init, const EffectiveModel& model,
                        const DampingParams& damping, const FockTruncation& trunc,
                        std::span<const double> grid, const OracleOptions& options)
{
    const auto closed = decoherence_trajectory(grid, init, model, damping, FMethod::closed);

    OracleReport report;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    const std::size_t checkpoints[3] = {0, grid.size() / 2, grid.size() - 1};

    std::size_t i = 0;
    evolve_blocks(init, model, damping, trunc, grid, options, [&](const LindbladBlocks& blocks) {
        const double t = blocks.t;
        const auto minus = damped_amplitudes_closed(init, model, damping, t, Branch::minus).value;
        const auto plus = damped_amplitudes_closed(init, model, damping, t, Branch::plus).value;
        const StateVector psi_minus = product_state(minus.alpha, minus.beta, trunc);
        const StateVector psi_plus = product_state(plus.alpha, plus.beta, trunc);

        OracleRow row;
        row.t = t;
        row.f_numeric = psi_minus.dot(blocks.mp * psi_plus);
        row.f_closed = closed[i].f;
        row.p_minus_numeric = p_minus_numeric(blocks);
        row.p_minus_closed = p_minus_dissipative(closed[i], minus, plus);
        row.fidelity_pp = std::real(psi_plus.dot(blocks.pp * psi_plus));
        row.fidelity_mm = std::real(psi_minus.dot(blocks.mm * psi_minus));
        report.rows.push_back(row);

        for (const DenseMatrix* rho : {&blocks.pp, &blocks.mm}) {
            report.max_trace_drift =
                std::max(report.max_trace_drift, std::abs(rho->trace() - 1.0));
            report.max_hermiticity_drift = std::max(
                report.max_hermiticity_drift, (*rho - rho->adjoint()).cwiseAbs().maxCoeff());
        }
        report.max_adjoint_drift = std::max(
            report.max_adjoint_drift, (blocks.mp - blocks.pm.adjoint()).cwiseAbs().maxCoeff());
        if (std::find(std::begin(checkpoints), std::end(checkpoints), i) !=
            std::end(checkpoints)) {
            report.min_eigenvalue =
                std::min({report.min_eigenvalue, min_hermitian_eigenvalue(blocks.pp),
                          min_hermitian_eigenvalue(blocks.mm)});
        }
        ++i;
    });
    return report;
}

} // namespace nemscat
