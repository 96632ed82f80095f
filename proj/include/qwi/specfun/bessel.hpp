#ifndef QWI_SPECFUN_BESSEL_HPP
#define QWI_SPECFUN_BESSEL_HPP

// Bessel functions of complex order and argument.
//
// J_nu by the ascending series (terms built from 1/Gamma so that orders at or near
// negative integers stay finite). Y_nu = (J_nu cos nu pi - J_{-nu}) / sin nu pi;
// within 1e-6 of an integer order Y is Richardson-extrapolated from samples at
// n +- e, n +- 2e (e = 1e-3).
//
//   |z| <= 10        ascending series
//   |z| >= 20        Hankel expansion (series as a fallback if it does not converge)
//   10 < |z| < 20    series when its cancellation is acceptable (imaginary-ish z),
//                    otherwise Taylor stepping of the Bessel ODE inward from |z| = 20
//                    (oscillatory-ish z, where stepping is neutrally stable). Integer
//                    orders on oscillatory rays step first.
//
// Where the strict series and stepping both fail, the series is accepted up to
// Tolerances::relaxed_cancellation.
//
// I_nu by the ascending series only.
//
// Accuracy domain for the J/Y pair: 0.1 <= |z| <= 40 with |Im z| <= 1, any real order
// in [0, 4], imaginary orders up to 4i for Re z > 0. Elsewhere J and Y grow together
// (large |Im z|, or imaginary order with Re z < 0) and the Wronskian is only accurate
// relative to |J Y'|; the pair J_nu, J_{-nu} is the better conditioned choice there.

#include <algorithm>
#include <cmath>
#include <complex>

#include "qwi/errors.hpp"
#include "qwi/specfun/funpair.hpp"
#include "qwi/specfun/gamma.hpp"
#include "qwi/specfun/taylor.hpp"
#include "qwi/specfun/tolerances.hpp"

namespace qwi::specfun {

namespace detail {

struct SeriesResult {
    cplx value;
    cplx deriv;
    double cancellation;  // sum |terms| / |sum|
};

// sum_k sign^k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)) and its z-derivative.
// sign = -1 gives J_nu, +1 gives I_nu.
inline SeriesResult bessel_series(cplx nu, cplx z, double sign) {
    const cplx half = 0.5 * z;
    const cplx q = sign * half * half;
    const cplx lead = std::pow(half, nu);
    cplx t = lead * rgamma(nu + 1.0);
    cplx sum = t, dsum = t * nu / z;
    double abs_sum = std::abs(t), abs_dsum = std::abs(dsum);
    int small_run = 0;
    for (int k = 0; k < Tolerances::max_series_terms; ++k) {
        cplx denom = double(k + 1) * (double(k + 1) + nu);
        if (std::abs(double(k + 1) + nu) < 0.5) {
            // Next to a pole of Gamma(k+nu+2): reseed from 1/Gamma directly.
            double sgn = ((k + 1) % 2 == 0 || sign > 0) ? 1.0 : -1.0;
            t = sgn * lead * std::pow(half, 2.0 * (k + 1)) * rgamma(double(k + 2) + nu) *
                std::exp(-std::lgamma(double(k + 2)));
        } else {
            t *= q / denom;
        }
        cplx dt = t * (2.0 * (k + 1) + nu) / z;
        sum += t;
        dsum += dt;
        abs_sum += std::abs(t);
        abs_dsum += std::abs(dt);
        bool tiny = std::abs(t) <= Tolerances::series_term * std::abs(sum) &&
                    std::abs(dt) <= Tolerances::series_term * std::abs(dsum);
        bool past_peak = double(k) > std::abs(z) && double(k) > std::abs(nu);
        small_run = (tiny && past_peak) ? small_run + 1 : 0;
        if (small_run >= 2) {
            double c = std::max(abs_sum / std::max(std::abs(sum), 1e-300),
                                abs_dsum / std::max(std::abs(dsum), 1e-300));
            return {sum, dsum, c};
        }
    }
    throw ConvergenceError("Bessel ascending series", 1.0);
}

inline bool near_integer(cplx nu, double window, double* n_out = nullptr) {
    double n = std::round(nu.real());
    if (n_out) *n_out = n;
    return std::abs(nu - n) < window;
}

inline FunPair jy_series_generic(cplx nu, cplx z, double max_loss = Tolerances::max_cancellation) {
    SeriesResult jp = bessel_series(nu, z, -1.0);
    SeriesResult jm = bessel_series(-nu, z, -1.0);
    double loss = std::max(jp.cancellation, jm.cancellation);
    if (loss > max_loss)
        throw ConvergenceError("Bessel series cancellation", loss * 1.1e-16);
    cplx c = std::cos(nu * pi), s = std::sin(nu * pi);
    return {jp.value, jp.deriv, (jp.value * c - jm.value) / s, (jp.deriv * c - jm.deriv) / s};
}

struct HankelResult {
    cplx j, y;
};

// Hankel expansion of J_nu, Y_nu for large |z|, |arg z| < pi.
inline HankelResult hankel(cplx nu, cplx z) {
    if (std::abs(z.imag()) > Tolerances::exp_guard) throw OverflowError("Bessel function overflows");
    const cplx mu = 4.0 * nu * nu;
    cplx a = 1.0, p = 1.0, qsum = 0.0;
    cplx zp = 1.0;
    double last = 1e300;
    bool converged = false;
    for (int k = 1; k < 400; ++k) {
        a *= (mu - double((2 * k - 1) * (2 * k - 1))) / (8.0 * k);
        zp /= z;
        cplx term = a * zp;
        double mag = std::abs(term);
        if (mag > last && double(k) > std::abs(nu)) break;
        last = std::min(last, mag);
        // k even -> P with sign (-1)^{k/2}; k odd -> Q with sign (-1)^{(k-1)/2}
        double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) p += sgn * term;
        else qsum += sgn * term;
        if (mag < Tolerances::series_term && double(k) > std::abs(nu)) {
            converged = true;
            break;
        }
        if (a == cplx(0.0)) {
            converged = true;  // half-integer order: terminating expansion
            break;
        }
    }
    if (!converged && last > Tolerances::asymptotic_term) throw ConvergenceError("Hankel expansion", last);
    cplx w = z - nu * (pi / 2.0) - pi / 4.0;
    cplx pref = std::sqrt(2.0 / (pi * z));
    cplx cw = std::cos(w), sw = std::sin(w);
    return {pref * (p * cw - qsum * sw), pref * (p * sw + qsum * cw)};
}

inline FunPair jy_hankel_right(cplx nu, cplx z) {
    HankelResult h0 = hankel(nu, z);
    HankelResult h1 = hankel(nu - 1.0, z);
    return {h0.j, h1.j - nu / z * h0.j, h0.y, h1.y - nu / z * h0.y};
}

// The expansion loses accuracy towards ph z = +-pi for complex order, so the left
// half plane goes through z = (-z) e^{+-i pi}:
//   J(z) = e^{+-i nu pi} J(-z),  Y(z) = e^{-+i nu pi} Y(-z) +- 2i cos(nu pi) J(-z).
inline FunPair jy_hankel(cplx nu, cplx z) {
    if (z.real() >= 0.0) return jy_hankel_right(nu, z);
    const double m = std::arg(z) > 0.0 ? 1.0 : -1.0;
    FunPair r = jy_hankel_right(nu, -z);
    const cplx i{0.0, 1.0};
    const cplx ej = std::exp(m * i * nu * pi), ey = std::exp(-m * i * nu * pi);
    const cplx cj = m * 2.0 * i * std::cos(nu * pi);
    // d/dz f(-z) = -f'(-z)
    return {ej * r.first, -ej * r.first_deriv, ey * r.second + cj * r.first,
            -(ey * r.second_deriv + cj * r.first_deriv)};
}

inline FunPair jy_series(cplx nu, cplx z, double max_loss = Tolerances::max_cancellation) {
    double n;
    if (!near_integer(nu, Tolerances::integer_window, &n)) return jy_series_generic(nu, z, max_loss);
    // Integer order: J directly, Y by Richardson extrapolation in the order.
    SeriesResult j = bessel_series(nu, z, -1.0);
    const double e = Tolerances::limit_offset;
    FunPair p1 = jy_series_generic(n + e, z, max_loss), m1 = jy_series_generic(n - e, z, max_loss);
    FunPair p2 = jy_series_generic(n + 2 * e, z, max_loss), m2 = jy_series_generic(n - 2 * e, z, max_loss);
    cplx d = nu - n;
    auto extrap = [&](cplx FunPair::*f) {
        cplx center = (4.0 * (p1.*f + m1.*f) - (p2.*f + m2.*f)) / 6.0;
        cplx slope = (8.0 * (p1.*f - m1.*f) - (p2.*f - m2.*f)) / (12.0 * e);
        return center + d * slope;
    };
    return {j.value, j.deriv, extrap(&FunPair::second), extrap(&FunPair::second_deriv)};
}

inline auto bessel_recurrence(cplx nu, cplx z0) {
    // z^2 y'' + z y' + (z^2 - nu^2) y = 0 expanded about z0.
    const cplx nu2 = nu * nu;
    return [z0, nu2](int n, cplx cm2, cplx cm1, cplx c0, cplx c1) {
        const double m = n;
        cplx rhs = (m + 1.0) * (2.0 * m + 1.0) * z0 * c1 + (m * m + z0 * z0 - nu2) * c0 + 2.0 * z0 * cm1 + cm2;
        return -rhs / (z0 * z0 * (m + 1.0) * (m + 2.0));
    };
}

inline FunPair jy_stepped(cplx nu, cplx z) {
    cplx from = z / std::abs(z) * Tolerances::bessel_hankel_radius;
    FunPair start = jy_hankel(nu, from);
    auto make = [nu](cplx z0) { return bessel_recurrence(nu, z0); };
    ValueDeriv j = taylor_walk({start.first, start.first_deriv}, from, z, Tolerances::bessel_step, make);
    ValueDeriv y = taylor_walk({start.second, start.second_deriv}, from, z, Tolerances::bessel_step, make);
    return {j.value, j.deriv, y.value, y.deriv};
}

}  // namespace detail

/// (J_nu, J_nu', Y_nu, Y_nu'). Wronskian J Y' - J' Y = 2/(pi z).
inline FunPair bessel_jy(cplx nu, cplx z) {
    if (z == cplx(0.0)) throw DomainError("bessel_jy: Y_nu is singular at z = 0");
    const double r = std::abs(z);
    if (r >= Tolerances::bessel_hankel_radius) {
        try {
            return detail::jy_hankel(nu, z);
        } catch (const ConvergenceError&) {
            return detail::jy_series(nu, z);
        }
    }
    // Integer orders on oscillatory rays: the Richardson limit of the series inherits
    // the series' cancellation, while stepping from the Hankel radius does not.
    const bool oscillatory = std::abs(z.imag()) < std::abs(z.real());
    if (r > Tolerances::bessel_series_radius && oscillatory &&
        detail::near_integer(nu, Tolerances::integer_window)) {
        try {
            return detail::jy_stepped(nu, z);
        } catch (const ConvergenceError&) {
        }
    }
    try {
        return detail::jy_series(nu, z);
    } catch (const ConvergenceError& series_error) {
        try {
            return detail::jy_stepped(nu, z);
        } catch (const ConvergenceError&) {
        }
        try {
            return detail::jy_series(nu, z, Tolerances::relaxed_cancellation);
        } catch (const ConvergenceError&) {
            throw series_error;
        }
    }
}

/// J_nu and J_nu' only. Unlike bessel_jy this is defined at z = 0 for Re nu >= 0.
inline ValueDeriv bessel_j(cplx nu, cplx z) {
    if (z == cplx(0.0)) {
        if (nu == cplx(0.0)) return {1.0, 0.0};
        if (nu == cplx(1.0)) return {0.0, 0.5};
        if (nu.real() > 1.0) return {0.0, 0.0};
        throw DomainError("bessel_j: J_nu(0) is not finite for this order");
    }
    detail::SeriesResult s = detail::bessel_series(nu, z, -1.0);
    if (s.cancellation <= Tolerances::max_cancellation) return {s.value, s.deriv};
    FunPair f = bessel_jy(nu, z);
    return {f.first, f.first_deriv};
}

/// Modified Bessel I_nu and its derivative by the ascending series.
inline ValueDeriv modified_bessel_i(cplx nu, cplx z) {
    if (z == cplx(0.0)) {
        if (nu == cplx(0.0)) return {1.0, 0.0};
        if (nu == cplx(1.0)) return {0.0, 0.5};
        if (nu.real() > 1.0) return {0.0, 0.0};
        throw DomainError("modified_bessel_i: I_nu(0) is not finite for this order");
    }
    detail::SeriesResult s = detail::bessel_series(nu, z, +1.0);
    if (s.cancellation > Tolerances::max_cancellation)
        throw ConvergenceError("modified Bessel series cancellation", s.cancellation * 1.1e-16);
    return {s.value, s.deriv};
}

}  // namespace qwi::specfun

#endif
