#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "nemscat/errors.hpp"
#include "nemscat/lindblad.hpp"

using namespace nemscat;
using doctest::Approx;
using std::numbers::pi;

namespace {

const EffectiveModel kSym = EffectiveModel::from_constants(1.0, 1.0, 1.0);

std::vector<double> uniform_grid(double t_max, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = t_max * i / (n - 1);
    return g;
}

OracleOptions with_dt(double dt)
{
    OracleOptions o;
    o.dt = dt;
    return o;
}

double max_f_change(const OracleReport& a, const OracleReport& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        worst = std::max(worst, std::abs(a.rows[i].f_numeric - b.rows[i].f_numeric));
    }
    return worst;
}

} // namespace

TEST_CASE("ladder operator matrices")
{
    const auto a2 = annihilation(2);
    CHECK(a2(0, 0) == cplx(0.0));
    CHECK(a2(0, 1) == cplx(1.0));
    CHECK(a2(1, 0) == cplx(0.0));
    CHECK(a2(1, 1) == cplx(0.0));

    const int n = 7;
    const DenseMatrix a = annihilation(n);
    const DenseMatrix number = a.adjoint() * a;
    const DenseMatrix comm = a * a.adjoint() - a.adjoint() * a;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CHECK(std::abs(number(i, j) - (i == j ? double(i) : 0.0)) < 1e-14);
            const double expected = i != j ? 0.0 : (i == n - 1 ? 1.0 - n : 1.0);
            CHECK(std::abs(comm(i, j) - expected) < 1e-14);
        }
    }
}

TEST_CASE("two-mode operators follow the (a, b) index order")
{
    const FockTruncation trunc{3, 4};
    const auto ops = mode_operators(trunc);
    const DenseMatrix a = annihilation(3);
    const DenseMatrix b = annihilation(4);
    const DenseMatrix id_a = DenseMatrix::Identity(3, 3);
    const DenseMatrix id_b = DenseMatrix::Identity(4, 4);
    DenseMatrix a_full = DenseMatrix::Zero(12, 12);
    DenseMatrix b_full = DenseMatrix::Zero(12, 12);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a_full.block(4 * i, 4 * j, 4, 4) = a(i, j) * id_b;
            b_full.block(4 * i, 4 * j, 4, 4) = id_a(i, j) * b;
        }
    }
    CHECK((DenseMatrix(ops.a) - a_full).norm() < 1e-14);
    CHECK((DenseMatrix(ops.b) - b_full).norm() < 1e-14);
    CHECK((DenseMatrix(ops.n_a) - a_full.adjoint() * a_full).norm() < 1e-14);
    CHECK((DenseMatrix(ops.n_b) - b_full.adjoint() * b_full).norm() < 1e-14);
    const DenseMatrix hop = a_full * b_full.adjoint() + a_full.adjoint() * b_full;
    CHECK((DenseMatrix(ops.hopping) - hop).norm() < 1e-14);
}

TEST_CASE("coherent vectors")
{
    const auto vac = coherent_vector(0.0, 5);
    CHECK(vac.v[0] == cplx(1.0));
    for (int i = 1; i < 5; ++i) CHECK(vac.v[i] == cplx(0.0));

    const auto two = coherent_vector(2.0, 32);
    CHECK(two.raw_norm >= 1.0 - 1e-8);

    const std::vector<cplx> amps{{0.0, 0.0}, {1.5, -0.3}, {-2.0, 0.0}, {0.7, 1.2}, {0.0, 2.0}};
    for (const cplx x : amps) {
        for (const cplx y : amps) {
            const cplx numeric = coherent_vector(x, 32).v.dot(coherent_vector(y, 32).v);
            const cplx exact =
                std::exp(-0.5 * std::norm(x) - 0.5 * std::norm(y) + std::conj(x) * y);
            CHECK(std::abs(numeric - exact) < 1e-8);
        }
    }
}

TEST_CASE("cutoff errors")
{
    CHECK_THROWS_AS(coherent_vector(3.0, 5), NumericalGateError);
    CHECK_THROWS_WITH(coherent_vector(3.0, 5), doctest::Contains("cutoff"));
    CHECK_THROWS_AS(FockTruncation::make(1, 8, 0.5), ConfigError);
    CHECK_THROWS_AS(FockTruncation::make(8, 8, 2.0), NumericalGateError);
    CHECK_NOTHROW(FockTruncation::make(22, 22, 2.0));
    CHECK(coherent_leakage(0.0, 3) == 0.0);
    CHECK(coherent_leakage(1.0, 1) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("no Hamiltonian and no loss keeps every block constant")
{
    const auto trunc = FockTruncation::make(14, 14, 1.0);
    const auto model = EffectiveModel::from_constants(0.0, 0.0, 0.0);
    const auto grid = uniform_grid(1.0, 3);
    const auto blocks = evolve_blocks({0.5, {0.0, 0.5}}, model, {}, trunc, grid, with_dt(0.05));
    for (const auto& b : blocks) {
        CHECK((b.pp - blocks.front().pp).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b.mp - blocks.front().mp).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("vacuum is stationary under loss")
{
    const auto trunc = FockTruncation::make(4, 4, 0.0);
    const auto damping = DampingParams::make(0.3, 0.7);
    const auto grid = uniform_grid(2.0, 5);
    const auto report = run_oracle({0.0, 0.0}, kSym, damping, trunc, grid, with_dt(0.01));
    for (const auto& r : report.rows) {
        CHECK(std::abs(r.f_numeric - 1.0) < 1e-12);
        CHECK(r.p_minus_numeric == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lossless evolution keeps the coherent-state ansatz")
{
    const InitialAmplitudes init{0.0, 1.2};
    const auto trunc = FockTruncation::make(14, 14, 1.2);
    const auto grid = uniform_grid(pi, 9);
    const auto report = run_oracle(init, kSym, {}, trunc, grid, with_dt(0.01));
    CHECK(std::abs(report.rows.front().f_numeric - 1.0) < 1e-12);
    for (const auto& r : report.rows) {
        CHECK(r.fidelity_pp > 1.0 - 1e-6);
        CHECK(r.fidelity_mm > 1.0 - 1e-6);
        CHECK(std::abs(r.f_numeric) == Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(r.p_minus_numeric - r.p_minus_closed) < 1e-6);
    }
    CHECK(report.max_trace_drift < 1e-8);
}

TEST_CASE("damped oracle agrees with the closed forms")
{
    const InitialAmplitudes init{0.0, 1.2};
    const auto damping = DampingParams::make(0.05, 0.05);
    const auto trunc = FockTruncation::make(14, 14, 1.2);
    const auto grid = uniform_grid(1.0, 6);
    const auto report = run_oracle(init, kSym, damping, trunc, grid, with_dt(0.01));
    for (const auto& r : report.rows) {
        CHECK(std::abs(r.f_numeric - r.f_closed) < 1e-3);
        CHECK(std::abs(r.p_minus_numeric - r.p_minus_closed) < 1e-3);
        CHECK(r.fidelity_pp > 1.0 - 1e-4);
        CHECK(r.fidelity_mm > 1.0 - 1e-4);
    }
    CHECK(report.max_trace_drift < 1e-8);
    CHECK(report.max_hermiticity_drift < 1e-8);
    CHECK(report.max_adjoint_drift < 1e-8);

    SUBCASE("cutoff robustness")
    {
        const auto wider = run_oracle(init, kSym, damping, FockTruncation::make(18, 18, 1.2),
                                      grid, with_dt(0.01));
        CHECK(max_f_change(report, wider) < 1e-6);
    }
    SUBCASE("step robustness")
    {
        const auto finer = run_oracle(init, kSym, damping, trunc, grid, with_dt(0.005));
        CHECK(max_f_change(report, finer) < 1e-6);
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            CHECK(std::abs(report.rows[i].p_minus_numeric - finer.rows[i].p_minus_numeric) <
                  1e-6);
        }
    }
}

TEST_CASE("diagonal blocks stay positive at the default step")
{
    const InitialAmplitudes init{0.0, 1.2};
    const auto report = run_oracle(init, kSym, DampingParams::make(0.05, 0.05),
                                   FockTruncation::make(14, 14, 1.2), uniform_grid(1.0, 3));
    CHECK(report.min_eigenvalue > -1e-8);
}

TEST_CASE("qubit dephasing only touches the coherences")
{
    const InitialAmplitudes init{0.0, 1.0};
    const auto trunc = FockTruncation::make(12, 12, 1.0);
    const auto grid = uniform_grid(0.5, 3);
    const auto base = run_oracle(init, kSym, DampingParams::make(0.05, 0.05), trunc, grid,
                                 with_dt(0.01));
    const auto dephased = run_oracle(init, kSym, DampingParams::make(0.05, 0.05, 0.2), trunc,
                                     grid, with_dt(0.01));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double decay = std::exp(-0.2 * grid[i]);
        CHECK(std::abs(dephased.rows[i].f_numeric - decay * base.rows[i].f_numeric) < 1e-7);
        CHECK(dephased.rows[i].fidelity_pp == Approx(base.rows[i].fidelity_pp).epsilon(1e-14));
        CHECK(std::abs(dephased.rows[i].f_numeric - dephased.rows[i].f_closed) < 1e-3);
    }
}

TEST_CASE("reduced-amplitude Fig. 6 scenario over the first two revivals")
{
    const InitialAmplitudes init{1.2, 1.2};
    const auto model = EffectiveModel::from_constants(1.0, 0.25, 0.5);
    const auto damping = DampingParams::make(0.001, 0.01);
    const auto trunc = FockTruncation::make(18, 18, std::sqrt(init.excitation()));
    const auto grid = uniform_grid(5.5, 23);
    const auto report = run_oracle(init, model, damping, trunc, grid, with_dt(0.01));
    for (const auto& r : report.rows) {
        CHECK(std::abs(r.p_minus_numeric - r.p_minus_closed) < 1e-3);
    }
}

TEST_CASE("results do not depend on the worker count")
{
    const InitialAmplitudes init{{0.3, 0.2}, 0.9};
    const auto trunc = FockTruncation::make(14, 14, std::sqrt(init.excitation()));
    const auto grid = uniform_grid(0.5, 3);
    const auto damping = DampingParams::make(0.05, 0.02, 0.01);
    ::setenv("NEMSCAT_THREADS", "1", 1);
    const auto serial = evolve_blocks(init, kSym, damping, trunc, grid, with_dt(0.01));
    ::setenv("NEMSCAT_THREADS", "4", 1);
    const auto threaded = evolve_blocks(init, kSym, damping, trunc, grid, with_dt(0.01));
    ::unsetenv("NEMSCAT_THREADS");
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].pp == threaded[i].pp);
        CHECK(serial[i].mm == threaded[i].mm);
        CHECK(serial[i].pm == threaded[i].pm);
        CHECK(serial[i].mp == threaded[i].mp);
    }
}

TEST_CASE("extract_f and p_minus at t = 0")
{
    const InitialAmplitudes init{0.4, -0.8};
    const auto trunc = FockTruncation::make(12, 12, std::sqrt(init.excitation()));
    const std::vector<double> grid{0.0};
    const auto blocks = evolve_blocks(init, kSym, DampingParams::make(0.1, 0.1), trunc, grid);
    const ModePair start{init.alpha0, init.beta0};
    CHECK(std::abs(extract_f(blocks.front(), start, start, trunc) - 1.0) < 1e-12);
    CHECK(p_minus_numeric(blocks.front()) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("step-doubling gate refuses a coarse dt and suggests a smaller one")
{
    const auto trunc = FockTruncation::make(14, 14, 1.2);
    const auto grid = uniform_grid(2.0, 3);
    CHECK_THROWS_WITH_AS(evolve_blocks({0.0, 1.2}, kSym, {}, trunc, grid, with_dt(0.5)),
                         doctest::Contains("try dt <="), NumericalGateError);
}

TEST_CASE("grid and dt validation")
{
    const auto trunc = FockTruncation::make(10, 10, 0.5);
    const std::vector<double> decreasing{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(evolve_blocks({0.0, 0.5}, kSym, {}, trunc, decreasing), ConfigError);
    const std::vector<double> ok{0.0, 0.1};
    CHECK_THROWS_AS(evolve_blocks({0.0, 0.5}, kSym, {}, trunc, ok, with_dt(0.0)), ConfigError);
}
