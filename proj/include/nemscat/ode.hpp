#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "nemscat/errors.hpp"

namespace nemscat::ode {

struct AdaptiveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-13;
    std::size_t max_steps = 50'000'000;
};

/// Classic RK4 with embedded step doubling: each step is taken once with h and twice
/// with h/2, the difference gives the local error estimate, and the accepted value is
/// the Richardson-extrapolated one. Works on any Eigen column vector.
template <class State, class Rhs>
class StepDoublingRk4 {
public:
    StepDoublingRk4(Rhs rhs, AdaptiveOptions opts = {})
        : rhs_(std::move(rhs)), opts_(opts), h_(opts.initial_step)
    {
    }

    /// Integrates from t0 to t1 (t1 >= t0) and returns y(t1). The step size carries over
    /// between calls so a trajectory can be advanced grid point by grid point.
    State advance(State y, double t0, double t1)
    {
        double t = t0;
        while (t < t1) {
            if (++steps_ > opts_.max_steps) {
                throw NumericalGateError("adaptive integrator exceeded max_steps at t=" +
                                         std::to_string(t));
            }
            const bool last = t + h_ >= t1;
            const double h = last ? t1 - t : h_;

            const State full = rk4_step(y, t, h);
            const State half = rk4_step(y, t, 0.5 * h);
            const State twice = rk4_step(half, t + 0.5 * h, 0.5 * h);
            const State diff = (twice - full) / 15.0;

            double err = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double scale = opts_.atol +
                                     opts_.rtol * std::max(std::abs(y[i]), std::abs(twice[i]));
                err = std::max(err, std::abs(diff[i]) / scale);
            }

            if (err <= 1.0) {
                y = twice + diff;
                t = last ? t1 : t + h;
                const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                if (!last) h_ = h * std::clamp(grow, 0.2, 5.0);
            } else {
                h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (h_ < opts_.min_step) {
                    throw NumericalGateError("adaptive step underflow at t=" + std::to_string(t) +
                                             " (h=" + std::to_string(h_) +
                                             ", error ratio=" + std::to_string(err) + ")");
                }
            }
        }
        return y;
    }

    std::size_t steps() const { return steps_; }

private:
    State rk4_step(const State& y, double t, double h) const
    {
        const State k1 = rhs_(t, y);
        const State k2 = rhs_(t + 0.5 * h, State(y + 0.5 * h * k1));
        const State k3 = rhs_(t + 0.5 * h, State(y + 0.5 * h * k2));
        const State k4 = rhs_(t + h, State(y + h * k3));
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    Rhs rhs_;
    AdaptiveOptions opts_;
    double h_;
    std::size_t steps_ = 0;
};

template <class State, class Rhs>
State integrate(Rhs rhs, State y0, double t0, double t1, AdaptiveOptions opts = {})
{
    StepDoublingRk4<State, Rhs> stepper(std::move(rhs), opts);
    return stepper.advance(std::move(y0), t0, t1);
}

} // namespace nemscat::ode
