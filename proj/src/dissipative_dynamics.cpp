#include "nemscat/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "nemscat/errors.hpp"

namespace nemscat {

namespace {

constexpr cplx I{0.0, 1.0};

using Vec2 = Eigen::Matrix<cplx, 2, 1>;
using Vec6 = Eigen::Matrix<cplx, 6, 1>;

double branch_sign(Branch branch) { return branch == Branch::minus ? 1.0 : -1.0; }

/// Splitting below which the two eigenmodes are treated as coalesced.
bool is_degenerate(cplx w, const EffectiveModel& model, const DampingParams& damping)
{
    const double scale =
        std::abs(model.kappa) + std::abs(model.Delta) + damping.gamma_a + damping.gamma_b;
    return std::abs(w) < 1e-14 || std::abs(w) <= 1e-6 * scale;
}

cplx complex_expm1(cplx z)
{
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

ModePair from_vec(const Vec2& v) { return {v[0], v[1]}; }

bool symmetric_case(const InitialAmplitudes& init, const EffectiveModel& model,
                    const DampingParams& damping)
{
    return init.alpha0 == cplx{} && init.beta0.imag() == 0.0 && model.chi == model.Omega &&
           model.chi == model.kappa && damping.gamma_a == damping.gamma_b;
}

/// Joint state (alpha_+, beta_+, alpha_-, beta_-, f, log f) for the quadrature path.
struct JointRhs {
    EffectiveModel model;
    DampingParams damping;

    Vec6 operator()(double, const Vec6& y) const
    {
        const ModePair plus{y[0], y[1]};
        const ModePair minus{y[2], y[3]};
        const ModePair dp = damped_ode_rhs(plus, Branch::plus, model, damping);
        const ModePair dm = damped_ode_rhs(minus, Branch::minus, model, damping);
        const cplx rate = decoherence_rate(minus, plus, damping) - damping.gamma_qubit;
        Vec6 out;
        out << dp.alpha, dp.beta, dm.alpha, dm.beta, y[4] * rate, rate;
        return out;
    }
};

Vec6 joint_initial(const InitialAmplitudes& init)
{
    Vec6 y;
    y << init.alpha0, init.beta0, init.alpha0, init.beta0, cplx{1.0, 0.0}, cplx{};
    return y;
}

DecoherenceRecord record_from_joint(double t, const Vec6& y)
{
    DecoherenceRecord r;
    r.t = t;
    r.f = y[4];
    r.log_f = y[5];
    return r;
}

void check_grid(std::span<const double> grid)
{
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
            throw DomainError("time grid must be finite and non-negative");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw DomainError("time grid must be strictly increasing");
        }
    }
}

} // namespace

DampingParams DampingParams::make(double gamma_a, double gamma_b, double gamma_qubit)
{
    if (!(gamma_a >= 0.0) || !(gamma_b >= 0.0) || !(gamma_qubit >= 0.0) ||
        !std::isfinite(gamma_a + gamma_b + gamma_qubit)) {
        throw DomainError("damping rates must be finite and non-negative");
    }
    return {gamma_a, gamma_b, gamma_qubit};
}

cplx mode_splitting(const EffectiveModel& model, const DampingParams& damping)
{
    const cplx shift = damping.gamma_a - damping.gamma_b + 2.0 * I * model.Delta;
    return std::sqrt(4.0 * model.kappa * model.kappa - shift * shift / 4.0);
}

ModeCoefficients mode_coefficients(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, Branch branch, cplx w)
{
    // The plus branch is the minus-branch problem with chi, Omega, kappa negated.
    const double s = branch_sign(branch);
    const double kappa = s * model.kappa;
    const double Delta = s * model.Delta;
    const double omega = s * model.omega_bar;
    const cplx skew = I * (damping.gamma_b - damping.gamma_a) / 4.0;
    const cplx a0 = init.alpha0;
    const cplx b0 = init.beta0;

    ModeCoefficients c;
    c.w = w;
    c.rate_u = -(damping.gamma_plus() - I * (omega - w / 2.0));
    c.rate_v = -(damping.gamma_plus() - I * (omega + w / 2.0));
    if (w == cplx{}) {
        c.degenerate = true;
        return c;
    }
    c.U = a0 / w * ((w + Delta) / 2.0 + skew) - kappa * b0 / w;
    c.V = a0 / w * ((w - Delta) / 2.0 - skew) + kappa * b0 / w;
    c.X = b0 / w * ((w - Delta) / 2.0 - skew) - kappa * a0 / w;
    c.Y = b0 / w * ((w + Delta) / 2.0 + skew) + kappa * a0 / w;
    return c;
}

ModeCoefficients mode_coefficients(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, Branch branch)
{
    const double s = branch_sign(branch);
    const auto signed_model = EffectiveModel::from_constants(s * model.chi, s * model.Omega,
                                                             s * model.kappa);
    const cplx w = mode_splitting(signed_model, damping);
    auto c = mode_coefficients(init, model, damping, branch, w);
    c.degenerate = c.degenerate || is_degenerate(w, model, damping);
    return c;
}

ModePair evaluate(const ModeCoefficients& c, double t)
{
    const cplx eu = std::exp(c.rate_u * t);
    const cplx ev = std::exp(c.rate_v * t);
    return {c.U * eu + c.V * ev, c.X * eu + c.Y * ev};
}

ModePair damped_ode_rhs(const ModePair& state, Branch branch, const EffectiveModel& model,
                        const DampingParams& damping)
{
    const cplx h = branch_sign(branch) * I;
    return {h * (model.chi * state.alpha + model.kappa * state.beta) -
                0.5 * damping.gamma_a * state.alpha,
            h * (model.kappa * state.alpha + model.Omega * state.beta) -
                0.5 * damping.gamma_b * state.beta};
}

ModePair damped_amplitudes_numeric(const InitialAmplitudes& init, const EffectiveModel& model,
                                   const DampingParams& damping, double t, Branch branch,
                                   const ode::AdaptiveOptions& opts)
{
    if (t < 0.0) throw DomainError("damped amplitudes are defined for t >= 0");
    auto rhs = [&](double, const Vec2& y) {
        const auto d = damped_ode_rhs({y[0], y[1]}, branch, model, damping);
        return Vec2(d.alpha, d.beta);
    };
    return from_vec(ode::integrate<Vec2>(rhs, Vec2(init.alpha0, init.beta0), 0.0, t, opts));
}

DampedAmplitudes damped_amplitudes_closed(const InitialAmplitudes& init,
                                          const EffectiveModel& model,
                                          const DampingParams& damping, double t, Branch branch)
{
    if (t < 0.0) throw DomainError("damped amplitudes are defined for t >= 0");
    if (t == 0.0) return {{init.alpha0, init.beta0}, false};
    const auto c = mode_coefficients(init, model, damping, branch);
    if (c.degenerate) {
        return {damped_amplitudes_numeric(init, model, damping, t, branch), true};
    }
    return {evaluate(c, t), false};
}

double energy_decay_check(std::span<const TrajectoryPoint> trajectory,
                          const DampingParams& damping)
{
    if (trajectory.size() < 3) {
        throw DomainError("energy_decay_check needs at least 3 grid points");
    }
    const double h = trajectory[1].t - trajectory[0].t;
    if (!(h > 0.0)) throw DomainError("trajectory grid must be strictly increasing");
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const double step = trajectory[i].t - trajectory[i - 1].t;
        if (std::abs(step - h) > 1e-9 * std::max(h, std::abs(trajectory[i].t))) {
            throw DomainError("trajectory grid must be uniform");
        }
    }
    auto total = [](const TrajectoryPoint& p) { return std::norm(p.alpha) + std::norm(p.beta); };
    double residual = 0.0;
    for (std::size_t i = 1; i + 1 < trajectory.size(); ++i) {
        const double rate = (total(trajectory[i + 1]) - total(trajectory[i - 1])) / (2.0 * h);
        const double loss = damping.gamma_a * std::norm(trajectory[i].alpha) +
                            damping.gamma_b * std::norm(trajectory[i].beta);
        residual = std::max(residual, std::abs(rate + loss));
    }
    return residual;
}

cplx decoherence_rate(const ModePair& minus, const ModePair& plus, const DampingParams& damping)
{
    const cplx a = minus.alpha * std::conj(plus.alpha) -
                   0.5 * (std::norm(minus.alpha) + std::norm(plus.alpha));
    const cplx b = minus.beta * std::conj(plus.beta) -
                   0.5 * (std::norm(minus.beta) + std::norm(plus.beta));
    return damping.gamma_a * a + damping.gamma_b * b;
}

cplx decoherence_G(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                   const DampingParams& damping)
{
    const auto minus = damped_amplitudes_closed(init, model, damping, t, Branch::minus).value;
    const auto plus = damped_amplitudes_closed(init, model, damping, t, Branch::plus).value;
    return decoherence_rate(minus, plus, damping);
}

cplx decoherence_G_alternate(double t, const InitialAmplitudes& init,
                             const EffectiveModel& model, const DampingParams& damping)
{
    const auto m = damped_amplitudes_closed(init, model, damping, t, Branch::minus).value;
    const auto dm = damped_ode_rhs(m, Branch::minus, model, damping);
    const double d_total =
        2.0 * std::real(std::conj(m.alpha) * dm.alpha + std::conj(m.beta) * dm.beta);
    return damping.gamma_a * m.alpha * m.alpha + damping.gamma_b * m.beta * m.beta + d_total;
}

namespace detail {

cplx exp_integral(cplx s, double t)
{
    const cplx z = s * t;
    if (z == cplx{}) return t;
    return t * complex_expm1(z) / z;
}

} // namespace detail

cplx log_f_conjugate_branches(const ModeCoefficients& minus, const InitialAmplitudes& init,
                              const DampingParams& damping, double t)
{
    if (t == 0.0) return {};
    const cplx x_plus = detail::exp_integral(2.0 * minus.rate_u, t);
    const cplx x_minus = detail::exp_integral(2.0 * minus.rate_v, t);
    const cplx y = detail::exp_integral(minus.rate_u + minus.rate_v, t);
    const auto now = evaluate(minus, t);
    return damping.gamma_a *
               (x_plus * minus.U * minus.U + x_minus * minus.V * minus.V +
                2.0 * minus.U * minus.V * y) +
           damping.gamma_b *
               (x_plus * minus.X * minus.X + x_minus * minus.Y * minus.Y +
                2.0 * minus.X * minus.Y * y) +
           (std::norm(now.alpha) - std::norm(init.alpha0)) +
           (std::norm(now.beta) - std::norm(init.beta0));
}

cplx log_f_two_branch(const ModeCoefficients& minus, const ModeCoefficients& plus,
                      const InitialAmplitudes& init, const DampingParams& damping, double t)
{
    if (t == 0.0) return {};
    const cplx m_rates[2] = {minus.rate_u, minus.rate_v};
    const cplx p_rates[2] = {std::conj(plus.rate_u), std::conj(plus.rate_v)};
    const cplx m_alpha[2] = {minus.U, minus.V};
    const cplx m_beta[2] = {minus.X, minus.Y};
    const cplx p_alpha[2] = {std::conj(plus.U), std::conj(plus.V)};
    const cplx p_beta[2] = {std::conj(plus.X), std::conj(plus.Y)};

    // integral of alpha_- conj(alpha_+) (and the b analogue) over [0, t]
    cplx cross_a{}, cross_b{};
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const cplx e = detail::exp_integral(m_rates[j] + p_rates[k], t);
            cross_a += m_alpha[j] * p_alpha[k] * e;
            cross_b += m_beta[j] * p_beta[k] * e;
        }
    }
    const auto m_now = evaluate(minus, t);
    const auto p_now = evaluate(plus, t);
    const double n0 = init.excitation();
    const double n_minus = std::norm(m_now.alpha) + std::norm(m_now.beta);
    const double n_plus = std::norm(p_now.alpha) + std::norm(p_now.beta);
    return damping.gamma_a * cross_a + damping.gamma_b * cross_b +
           0.5 * ((n_minus - n0) + (n_plus - n0));
}

std::vector<DecoherenceRecord> decoherence_trajectory(std::span<const double> grid,
                                                      const InitialAmplitudes& init,
                                                      const EffectiveModel& model,
                                                      const DampingParams& damping,
                                                      FMethod method,
                                                      const QuadratureOptions& quad)
{
    check_grid(grid);
    std::vector<DecoherenceRecord> out;
    out.reserve(grid.size());

    const auto minus = mode_coefficients(init, model, damping, Branch::minus);
    const auto plus = mode_coefficients(init, model, damping, Branch::plus);
    if (minus.degenerate || plus.degenerate) method = FMethod::quadrature;

    if (method == FMethod::closed) {
        const bool conjugate = init.is_real();
        for (const double t : grid) {
            DecoherenceRecord r;
            r.t = t;
            r.log_f = (conjugate ? log_f_conjugate_branches(minus, init, damping, t)
                                 : log_f_two_branch(minus, plus, init, damping, t)) -
                      damping.gamma_qubit * t;
            r.f = std::exp(r.log_f);
            out.push_back(r);
        }
    } else {
        ode::StepDoublingRk4<Vec6, JointRhs> stepper(JointRhs{model, damping}, quad.adaptive);
        Vec6 y = joint_initial(init);
        double t_prev = 0.0;
        for (const double t : grid) {
            y = stepper.advance(y, t_prev, t);
            t_prev = t;
            out.push_back(record_from_joint(t, y));
        }
    }

    if (symmetric_case(init, model, damping)) {
        const double B = init.beta0.real();
        for (auto& r : out) r.f_short_time = short_time_f(r.t, B, model.kappa, damping.gamma_a);
    }
    return out;
}

DecoherenceRecord decoherence_f(double t, const InitialAmplitudes& init,
                                const EffectiveModel& model, const DampingParams& damping,
                                FMethod method, const QuadratureOptions& quad)
{
    const double grid[1] = {t};
    return decoherence_trajectory(grid, init, model, damping, method, quad).front();
}

cplx symmetric_case_f(double t, double B, double kappa, double gamma)
{
    const double B2 = B * B;
    const cplx z = gamma - 4.0 * I * kappa;
    // (1 - e^{-z t}) / z == exp_integral(-z, t)
    return std::exp(0.5 * B2 * std::expm1(-gamma * t) +
                    0.5 * gamma * B2 * detail::exp_integral(-z, t));
}

cplx short_time_f(double t, double B, double kappa, double gamma)
{
    const double B2 = B * B;
    return std::exp(cplx{-(4.0 * B2 / 3.0) * gamma * kappa * kappa * t * t * t,
                         B2 * kappa * gamma * t * t});
}

double p_minus_dissipative(const DecoherenceRecord& record, const ModePair& minus,
                           const ModePair& plus)
{
    const cplx overlap =
        coherent_overlap(plus.alpha, minus.alpha) * coherent_overlap(plus.beta, minus.beta);
    return std::clamp(0.5 * (1.0 + std::real(record.f * overlap)), 0.0, 1.0);
}

double p_minus_dissipative(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                           const DampingParams& damping)
{
    const auto record = decoherence_f(t, init, model, damping, FMethod::closed);
    const auto minus = damped_amplitudes_closed(init, model, damping, t, Branch::minus).value;
    const auto plus = damped_amplitudes_closed(init, model, damping, t, Branch::plus).value;
    return p_minus_dissipative(record, minus, plus);
}

double sigma_x_expectation(double t, const InitialAmplitudes& init, const EffectiveModel& model,
                           const DampingParams& damping)
{
    return std::real(decoherence_f(t, init, model, damping, FMethod::closed).f);
}

} // namespace nemscat
