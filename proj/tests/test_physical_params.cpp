#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nemscat/errors.hpp"
#include "nemscat/physical_params.hpp"

using namespace nemscat;
using doctest::Approx;

namespace {

DeviceParams section4_device()
{
    DeviceParams p;
    p.E_C = 5e9 * constants::hbar;
    p.E_J = 2e9 * constants::hbar;
    p.n_g0 = 0.5;
    p.C_g = 1e-16;
    p.C_Sigma = 1e-15;
    p.L = 1e-9;
    p.c = 1e-12;
    p.omega_r = 2e10;
    p.nu = 1e9;
    p.m = 1e-21;
    p.d = 20e-9;
    p.delta = 1e8;
    p.g = 6e6;
    return p;
}

} // namespace

TEST_CASE("x_rms examples")
{
    CHECK(x_rms(1e-21, 1e9) == Approx(7.26e-12).epsilon(1e-3));
    CHECK(x_rms(4e-21, 1e9) == Approx(0.5 * x_rms(1e-21, 1e9)).epsilon(1e-14));
    CHECK(x_rms(4e-21, 1e9) == Approx(3.63e-12).epsilon(1e-3));
    CHECK(x_rms(constants::hbar / 2.0, 1.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("x_rms rejects non-positive input")
{
    CHECK_THROWS_AS(x_rms(0.0, 1e9), DomainError);
    CHECK_THROWS_AS(x_rms(1e-21, -1.0), DomainError);
    CHECK_THROWS_AS(x_rms(std::nan(""), 1.0), DomainError);
}

TEST_CASE("cpb_gap examples")
{
    CHECK(cpb_gap(1.0, 2.5, 0.5) == 2.5);
    CHECK(cpb_gap(1.0, 3.0, 0.0) == Approx(5.0));
    CHECK(cpb_gap(0.7, 0.0, 0.0) == Approx(4.0 * 0.7));
    CHECK_THROWS_AS(cpb_gap(1.0, 1.0, 1.5), DomainError);
    CHECK_THROWS_AS(cpb_gap(-1.0, 1.0, 0.2), DomainError);
}

TEST_CASE("cpb_gap monotone in E_J and |1 - 2 n_g0|")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double ec = 0.1 + u(rng);
        const double ej = u(rng);
        const double ng = 0.5 * u(rng);
        CHECK(cpb_gap(ec, ej + 0.1, ng) >= cpb_gap(ec, ej, ng));
        CHECK(cpb_gap(ec, ej, ng * 0.5) >= cpb_gap(ec, ej, ng));
        CHECK(cpb_gap(ec, ej, ng) >= ej);
    }
}

TEST_CASE("mixing angle examples")
{
    CHECK(mixing_angle(1.0, 3.0, 0.5) == Approx(std::numbers::pi / 2));
    CHECK(mixing_angle(1.0, 4.0 * 1.0 * (1.0 - 2.0 * 0.25), 0.25) == Approx(std::numbers::pi / 4));
    CHECK(mixing_angle(1.0, 1e-12, 0.1) == Approx(0.0).epsilon(1e-10));
    CHECK_THROWS_AS(mixing_angle(1.0, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(mixing_angle(0.0, 0.0, 0.3), DomainError);
}

TEST_CASE("mixing angle is pi/2 at the degeneracy point")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int i = 0; i < 200; ++i) {
        CHECK(mixing_angle(u(rng), u(rng), 0.5) == Approx(std::numbers::pi / 2).epsilon(1e-15));
    }
}

TEST_CASE("raw couplings of the optimistic device estimate")
{
    const auto raw = raw_couplings(section4_device());
    CHECK(raw.x_rms == Approx(7.26e-12).epsilon(1e-3));
    CHECK(raw.lambda == Approx(3.63e6).epsilon(2e-3));
    CHECK(raw.lambda / raw.g == Approx(0.605).epsilon(2e-3));
    CHECK(raw.chi_cross == Approx(6e6 * raw.x_rms / 20e-9).epsilon(1e-15));
    CHECK(raw.chi_cross == Approx(2.2e3).epsilon(1e-2));
    CHECK(raw.epsilon == section4_device().E_J);
    CHECK(raw.theta == Approx(std::numbers::pi / 2));
}

TEST_CASE("frozen oscillator gives no resonator coupling")
{
    CHECK(resonator_coupling(1e-24, 0.0, 1e-8) == 0.0);
    CHECK(cross_coupling(6e6, 0.0, 1e-8) == 0.0);
}

TEST_CASE("cross coupling example")
{
    CHECK(cross_coupling(6e6, 3.63e-4, 1.0) == Approx(2178.0));
}

TEST_CASE("raw couplings scale as 1/d")
{
    auto p = section4_device();
    const auto base = raw_couplings(p);
    for (const double s : {0.5, 2.0, 8.0}) {
        p.d = 20e-9 * s;
        const auto scaled = raw_couplings(p);
        CHECK(scaled.lambda == Approx(base.lambda / s).epsilon(1e-14));
        CHECK(scaled.chi_cross == Approx(base.chi_cross / s).epsilon(1e-14));
    }
}

TEST_CASE("cavity coupling formula is used when g is not given")
{
    auto p = section4_device();
    p.g.reset();
    const double expected = constants::elementary_charge * 0.1 *
                            std::sqrt(constants::hbar * p.omega_r / (p.L * p.c)) /
                            constants::hbar;
    CHECK(raw_couplings(p).g == Approx(expected).epsilon(1e-14));
}

TEST_CASE("device validation names the offending field")
{
    auto p = section4_device();
    p.d = 0.0;
    CHECK_THROWS_WITH_AS(raw_couplings(p), doctest::Contains("d must"), DomainError);
    p = section4_device();
    p.L = 0.0;
    CHECK_THROWS_AS(raw_couplings(p), DomainError);
    p = section4_device();
    p.n_g0 = 1.2;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("n_g0"), DomainError);
    p = section4_device();
    p.delta = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("delta"), DomainError);
    p = section4_device();
    p.delta = -3e8;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("effective model examples")
{
    const auto m = effective_model(6.0, 3.0, 1.0);
    CHECK(m.chi == 36.0);
    CHECK(m.Omega == 9.0);
    CHECK(m.kappa == 18.0);
    CHECK(m.kappa / m.chi == 0.5);
    CHECK(m.Omega / m.chi == 0.25);

    const auto sym = effective_model(2.5, 2.5, -0.3);
    CHECK(sym.chi == sym.Omega);
    CHECK(sym.chi == sym.kappa);

    const auto o = effective_model(6.0, 3.0, 1.0, {1.0, 0.25, 0.5});
    CHECK(o.omega_bar == 0.625);
    CHECK(o.Delta == -0.75);
    CHECK(o.R == Approx(1.25).epsilon(1e-15));
}

TEST_CASE("effective model errors")
{
    CHECK_THROWS_AS(effective_model(6.0, 3.0, 1.0, {1.0, std::nullopt, 0.5}), ConfigError);
    CHECK_THROWS_AS(effective_model(6.0, 3.0, 1.0, {std::nullopt, std::nullopt, 0.5}), ConfigError);
    CHECK_THROWS_AS(effective_model(6.0, 3.0, 0.0), DomainError);
}

TEST_CASE("kappa^2 = chi Omega and R^2 = Delta^2 + 4 kappa^2")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        double delta = u(rng);
        if (std::abs(delta) < 1e-3) delta = 1.0;
        const auto m = effective_model(u(rng), u(rng), delta);
        CHECK(m.kappa * m.kappa == Approx(m.chi * m.Omega).epsilon(1e-12));
        CHECK(m.R * m.R == Approx(m.Delta * m.Delta + 4 * m.kappa * m.kappa).epsilon(1e-12));
        CHECK(m.R >= std::abs(m.Delta));
        CHECK(m.R >= 2 * std::abs(m.kappa));
    }
}
