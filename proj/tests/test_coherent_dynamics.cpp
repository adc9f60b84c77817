#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nemscat/coherent.hpp"

using namespace nemscat;
using doctest::Approx;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};

struct Draw {
    InitialAmplitudes init;
    EffectiveModel model;
    double t;
};

Draw random_draw(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> amp(-3.0, 3.0);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> time(-10.0, 10.0);
    Draw d;
    d.init = {{amp(rng), amp(rng)}, {amp(rng), amp(rng)}};
    d.model = EffectiveModel::from_constants(coef(rng), coef(rng), coef(rng));
    d.t = time(rng);
    return d;
}

ModePair expm_oracle(const InitialAmplitudes& init, const EffectiveModel& m, double t)
{
    Eigen::Matrix2cd M;
    M << m.chi, m.kappa, m.kappa, m.Omega;
    const Eigen::Matrix2cd U = (-I * t * M).exp();
    const Eigen::Vector2cd v = U * Eigen::Vector2cd(init.alpha0, init.beta0);
    return {v(0), v(1)};
}

} // namespace

TEST_CASE("t = 0 returns the initial amplitudes")
{
    const InitialAmplitudes init{{0.3, -1.0}, {2.0, 0.5}};
    const auto m = EffectiveModel::from_constants(1.0, 0.25, 0.5);
    for (const auto b : {Branch::plus, Branch::minus}) {
        const auto s = evolve_amplitudes(init, m, 0.0, b);
        CHECK(s.alpha == init.alpha0);
        CHECK(s.beta == init.beta0);
    }
}

TEST_CASE("symmetric case at t = pi/4")
{
    const auto m = EffectiveModel::from_constants(1.0, 1.0, 1.0);
    const auto s = evolve_amplitudes({0.0, 4.0}, m, pi / 4, Branch::plus);
    CHECK(s.alpha.real() == Approx(-2.0).epsilon(1e-14));
    CHECK(s.alpha.imag() == Approx(-2.0).epsilon(1e-14));
    CHECK(s.beta.real() == Approx(2.0).epsilon(1e-14));
    CHECK(s.beta.imag() == Approx(-2.0).epsilon(1e-14));
    CHECK(std::norm(s.alpha) + std::norm(s.beta) == Approx(16.0).epsilon(1e-14));

    const auto sym = symmetric_case_amplitudes(4.0, 1.0, pi / 4);
    CHECK(std::abs(sym.alpha - s.alpha) < 1e-13);
    CHECK(std::abs(sym.beta - s.beta) < 1e-13);
}

TEST_CASE("decoupled modes rotate independently")
{
    const InitialAmplitudes init{{1.0, 0.5}, {-0.4, 2.0}};
    const auto m = EffectiveModel::from_constants(0.7, -1.3, 0.0);
    for (const double t : {0.1, 1.7, 12.0}) {
        const auto s = evolve_amplitudes(init, m, t, Branch::plus);
        CHECK(std::abs(s.alpha - init.alpha0 * std::exp(-I * 0.7 * t)) < 1e-13);
        CHECK(std::abs(s.beta - init.beta0 * std::exp(I * 1.3 * t)) < 1e-13);
    }
}

TEST_CASE("R = 0 is a pure phase")
{
    const InitialAmplitudes init{{1.0, 0.0}, {0.0, 1.0}};
    const auto m = EffectiveModel::from_constants(0.8, 0.8, 0.0);
    const auto s = evolve_amplitudes(init, m, 2.0, Branch::plus);
    CHECK(std::abs(s.alpha - init.alpha0 * std::exp(-I * 1.6)) < 1e-14);
    CHECK(std::abs(s.beta - init.beta0 * std::exp(-I * 1.6)) < 1e-14);
}

TEST_CASE("p_minus examples")
{
    const auto m = EffectiveModel::from_constants(1.0, 1.0, 1.0);
    const InitialAmplitudes init{0.0, 4.0};
    CHECK(p_minus(init, m, 0.0) == 1.0);
    CHECK(p_minus(init, m, pi / 2) == Approx(1.0).epsilon(1e-12));
    CHECK(p_minus(init, m, pi / 4) == Approx(0.5 * (1.0 + std::exp(-16.0))).epsilon(1e-12));
}

TEST_CASE("interference phase examples")
{
    const auto m = EffectiveModel::from_constants(1.0, 1.0, 1.0);
    CHECK(interference_phase({0.0, 4.0}, m, 0.0) == 0.0);
    CHECK(interference_phase({0.0, 4.0}, m, pi / 8) == Approx(8.0).epsilon(1e-13));
    const auto g = EffectiveModel::from_constants(1.0, 0.25, 0.5);
    for (const double t : {0.0, 0.3, 5.0}) CHECK(interference_phase({0.0, 0.0}, g, t) == 0.0);
}

TEST_CASE("symmetric case amplitudes examples")
{
    const double B = 3.0;
    const double kappa = 0.7;
    const auto transfer = symmetric_case_amplitudes(B, kappa, pi / (2 * kappa));
    CHECK(std::abs(transfer.alpha - cplx(-B, 0.0)) < 1e-13);
    CHECK(std::abs(transfer.beta) < 1e-13);
    const auto start = symmetric_case_amplitudes(B, kappa, 0.0);
    CHECK(start.alpha == cplx(0.0, 0.0));
    CHECK(start.beta == cplx(B, 0.0));
    for (double t = 0.0; t < 10.0; t += 0.37) {
        const auto s = symmetric_case_amplitudes(B, kappa, t);
        CHECK(std::norm(s.alpha) + std::norm(s.beta) == Approx(B * B).epsilon(1e-14));
    }
}

TEST_CASE("coherent overlap")
{
    CHECK(coherent_overlap(0.0, 0.0) == cplx(1.0, 0.0));
    const cplx a{0.3, 1.1};
    CHECK(std::abs(coherent_overlap(a, a) - 1.0) < 1e-15);
    const cplx b{-0.5, 0.2};
    CHECK(std::abs(coherent_overlap(a, b) - std::conj(coherent_overlap(b, a))) < 1e-15);
    CHECK(std::norm(coherent_overlap(a, b)) == Approx(std::exp(-std::norm(a - b))).epsilon(1e-14));
}

TEST_CASE("property: conservation over 1000 random draws")
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto d = random_draw(rng);
        for (const auto b : {Branch::plus, Branch::minus}) {
            const auto s = evolve_amplitudes(d.init, d.model, d.t, b);
            const double drift =
                std::abs(std::norm(s.alpha) + std::norm(s.beta) - d.init.excitation());
            CHECK(drift < 1e-10 * (1.0 + d.init.excitation()));
        }
    }
}

TEST_CASE("property: agreement with the matrix exponential")
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
        const auto d = random_draw(rng);
        const auto plus = evolve_amplitudes(d.init, d.model, d.t, Branch::plus);
        const auto ref = expm_oracle(d.init, d.model, d.t);
        CHECK(std::abs(plus.alpha - ref.alpha) < 1e-10);
        CHECK(std::abs(plus.beta - ref.beta) < 1e-10);
        const auto minus = evolve_amplitudes(d.init, d.model, d.t, Branch::minus);
        const auto ref_minus = expm_oracle(d.init, d.model, -d.t);
        CHECK(std::abs(minus.alpha - ref_minus.alpha) < 1e-10);
        CHECK(std::abs(minus.beta - ref_minus.beta) < 1e-10);
    }
}

TEST_CASE("property: group law")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> time(-5.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        const auto d = random_draw(rng);
        const double t1 = time(rng);
        const double t2 = time(rng);
        const auto mid = evolve_amplitudes(d.init, d.model, t1, Branch::plus);
        const auto two = evolve_amplitudes({mid.alpha, mid.beta}, d.model, t2, Branch::plus);
        const auto one = evolve_amplitudes(d.init, d.model, t1 + t2, Branch::plus);
        CHECK(std::abs(two.alpha - one.alpha) < 1e-10);
        CHECK(std::abs(two.beta - one.beta) < 1e-10);
    }
}

TEST_CASE("property: p_minus bounds and overlap form")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 1000; ++i) {
        const auto d = random_draw(rng);
        const double p = p_minus(d.init, d.model, d.t);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        const auto s = branch_state(d.init, d.model, d.t);
        const double via_overlap =
            0.5 * (1.0 + std::real(coherent_overlap(s.alpha_plus, s.alpha_minus) *
                                   coherent_overlap(s.beta_plus, s.beta_minus)));
        CHECK(p == Approx(via_overlap).epsilon(1e-12));
        CHECK(p_minus(d.init, d.model, 0.0) == 1.0);
    }
}

TEST_CASE("property: symmetric specialization matches the general formula")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double B = u(rng);
        const double k = u(rng);
        const double t = 4.0 * u(rng);
        const auto general =
            evolve_amplitudes({0.0, B}, EffectiveModel::from_constants(k, k, k), t, Branch::plus);
        const auto sym = symmetric_case_amplitudes(B, k, t);
        CHECK(std::abs(general.alpha - sym.alpha) < 1e-10);
        CHECK(std::abs(general.beta - sym.beta) < 1e-10);
    }
}
