#ifndef QWI_DETAIL_ODE_HPP
#define QWI_DETAIL_ODE_HPP

// Adaptive Runge-Kutta-Fehlberg 7(8) driver shared by the numeric basis and the
// Riccati oracle. Integrates in either direction and lets the caller inspect (and
// rewrite) the state after every accepted step.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <utility>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/controlled_step_result.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "qwi/errors.hpp"

namespace qwi::detail {

inline constexpr long max_ode_steps = 2000000;

/// Integrate y' = sys(y, x) from x0 to x1 with relative and absolute tolerance tol.
/// after(y, x) runs after each accepted step; it may modify y.
template <class State, class System, class AfterStep>
void integrate_rkf78(System&& sys, State& y, double x0, double x1, double tol, AfterStep&& after) {
    namespace ode = boost::numeric::odeint;
    const double span = x1 - x0;
    if (span == 0.0) return;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const double min_dt = 1e-14 * std::max({std::abs(x0), std::abs(x1), std::abs(span)});
    double x = x0;
    double dt = span / 8.0;
    long steps = 0;
    while (dir * (x1 - x) > 0.0) {
        if (dir * (x + dt - x1) > 0.0) dt = x1 - x;
        const State saved = y;
        const double x_saved = x, dt_saved = dt;
        const bool accepted = stepper.try_step(sys, y, x, dt) == ode::success;
        if (!std::all_of(std::begin(y), std::end(y), [](const auto& v) { return std::isfinite(v); })) {
            // A non-finite trial state carries a NaN error estimate, which the controller accepts.
            y = saved;
            x = x_saved;
            dt = 0.25 * dt_saved;
            if (std::abs(dt) < min_dt) throw StepUnderflowError("non-finite state", x);
            continue;
        }
        if (accepted) {
            after(y, x);
            if (++steps > max_ode_steps) throw StepUnderflowError("step budget exhausted", x);
            // Land exactly on x1 instead of creeping towards it.
            if (std::abs(x1 - x) <= min_dt) break;
        } else if (std::abs(dt) < min_dt) {
            throw StepUnderflowError("step size underflow", x);
        }
    }
}

template <class State, class System>
void integrate_rkf78(System&& sys, State& y, double x0, double x1, double tol) {
    integrate_rkf78(std::forward<System>(sys), y, x0, x1, tol, [](State&, double) {});
}

}  // namespace qwi::detail

#endif
