#ifndef QWI_SPECFUN_TAYLOR_HPP
#define QWI_SPECFUN_TAYLOR_HPP

// Analytic continuation of a second-order linear ODE by local Taylor series.
// The ODE enters only through its coefficient recurrence.

#include <cmath>
#include <complex>

#include "qwi/errors.hpp"
#include "qwi/specfun/tolerances.hpp"

namespace qwi::specfun {

using cplx = std::complex<double>;

struct ValueDeriv {
    cplx value;
    cplx deriv;
};

/// One Taylor step from z0 to z0 + h. `next(n, c_{n-2}, c_{n-1}, c_n, c_{n+1})`
/// returns c_{n+2} of the expansion about z0 (coefficients with negative index are 0).
template <class Recurrence>
ValueDeriv taylor_step(ValueDeriv at_z0, cplx h, Recurrence&& next) {
    cplx cm2 = 0.0, cm1 = 0.0, c0 = at_z0.value, c1 = at_z0.deriv;
    cplx hp = 1.0;  // h^n
    cplx y = c0 + c1 * h, dy = c1;
    int small_run = 0;
    for (int n = 0; n < Tolerances::max_series_terms; ++n) {
        cplx c2 = next(n, cm2, cm1, c0, c1);
        hp *= h;                        // h^{n+1}
        cplx ty = c2 * hp * h;          // c_{n+2} h^{n+2}
        cplx tdy = double(n + 2) * c2 * hp;  // (n+2) c_{n+2} h^{n+1}
        y += ty;
        dy += tdy;
        // Joint scale so that a zero of y or y' at the end point does not stall.
        double ah = std::abs(h);
        double scale = std::abs(y) + ah * std::abs(dy);
        bool tiny = std::abs(ty) <= Tolerances::series_term * scale &&
                    ah * std::abs(tdy) <= Tolerances::series_term * scale;
        small_run = tiny ? small_run + 1 : 0;
        if (small_run >= 3 && n > 4) return {y, dy};
        cm2 = cm1;
        cm1 = c0;
        c0 = c1;
        c1 = c2;
    }
    throw ConvergenceError("Taylor step did not converge", 1.0);
}

/// Walk along the straight line from `from` to `to` in steps no longer than max_step.
template <class RecurrenceFactory>
ValueDeriv taylor_walk(ValueDeriv start, cplx from, cplx to, double max_step, RecurrenceFactory&& make) {
    cplx delta = to - from;
    double len = std::abs(delta);
    if (len == 0.0) return start;
    int steps = int(std::ceil(len / max_step));
    cplx h = delta / double(steps);
    ValueDeriv cur = start;
    for (int i = 0; i < steps; ++i) {
        cplx z0 = from + double(i) * h;
        cur = taylor_step(cur, h, make(z0));
    }
    return cur;
}

}  // namespace qwi::specfun

#endif
