#ifndef QWI_SPECFUN_AIRY_HPP
#define QWI_SPECFUN_AIRY_HPP

// Airy functions Ai, Bi and their derivatives for complex argument.
//
//   |z| <= 2            Maclaurin series (a Taylor step from the origin).
//   |z| >= 9            asymptotic expansion of Ai in |arg z| <= 2pi/3, extended to
//                       the rest of the plane by Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z).
//   2 < |z| < 9         Taylor stepping along the ray through z: inward from |z| = 9
//                       where Ai is recessive (|arg z| < pi/3), outward from |z| = 2
//                       elsewhere. Both directions are numerically stable.
//
// Bi is always formed from Ai via Bi(z) = e^{i pi/6} Ai(wz) + e^{-i pi/6} Ai(w^{-1} z),
// w = e^{2 pi i/3}, except inside the series disc.
//
// Overflow guard: an OverflowError is raised when |Re zeta| > 700 with
// zeta = (2/3) z^{3/2}; on the real axis that is |x| > ~104.
//
// Accuracy domain: the Wronskian holds to 1e-8 relative for |Re z| <= 20,
// |Im z| <= 1. Further from the real axis Ai and Bi are both exponentially large
// and the Wronskian is only accurate relative to |Ai Bi'|.

#include <cmath>
#include <complex>

#include "qwi/errors.hpp"
#include "qwi/specfun/funpair.hpp"
#include "qwi/specfun/taylor.hpp"
#include "qwi/specfun/tolerances.hpp"

namespace qwi::specfun {

namespace detail {

inline constexpr double ai0 = 0.355028053887817239260063186004;   // Ai(0)
inline constexpr double aip0 = -0.258819403792806798405183560189;  // Ai'(0)
inline constexpr double sqrt3 = 1.732050807568877293527446341506;

inline auto airy_recurrence(cplx z0) {
    // y'' = z y about z0:  c_{n+2} = (z0 c_n + c_{n-1}) / ((n+1)(n+2))
    return [z0](int n, cplx, cplx cm1, cplx c0, cplx) { return (z0 * c0 + cm1) / (double(n + 1) * double(n + 2)); };
}

inline ValueDeriv airy_maclaurin(cplx z, ValueDeriv at_origin) {
    return taylor_step(at_origin, z, airy_recurrence(0.0));
}

inline void check_exp_range(cplx zeta) {
    if (std::abs(zeta.real()) > Tolerances::exp_guard)
        throw OverflowError("Airy function overflows double range");
}

// Asymptotic Ai, Ai' for |arg z| <= 2pi/3 and large |z|.
inline ValueDeriv ai_asymptotic(cplx z) {
    cplx sz = std::sqrt(z);
    cplx zeta = (2.0 / 3.0) * z * sz;
    check_exp_range(zeta);
    cplx z14 = std::sqrt(sz);
    cplx su = 1.0, sv = 1.0;
    double uk = 1.0;
    cplx pw = 1.0;
    double last = 1e300;
    bool converged = false;
    for (int k = 1; k < 200; ++k) {
        uk *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        double vk = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * uk;
        pw *= -1.0 / zeta;
        cplx tu = uk * pw, tv = vk * pw;
        double mag = std::max(std::abs(tu), std::abs(tv));
        if (mag > last) break;
        su += tu;
        sv += tv;
        last = mag;
        if (mag < Tolerances::series_term) {
            converged = true;
            break;
        }
    }
    if (!converged && last > Tolerances::asymptotic_term)
        throw ConvergenceError("Airy asymptotic expansion", last);
    const double inv_2sqrtpi = 0.282094791773878143474039725780;
    cplx e = std::exp(-zeta);
    return {inv_2sqrtpi * e / z14 * su, -inv_2sqrtpi * z14 * e * sv};
}

inline const cplx omega{-0.5, 0.866025403784438646763723170753};  // e^{2 pi i/3}

inline ValueDeriv ai_far(cplx z) {
    if (std::abs(std::arg(z)) <= 2.0 * pi / 3.0) return ai_asymptotic(z);
    // Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z); the rotated points lie in |arg| <= 2pi/3.
    cplx w2 = omega * omega;
    ValueDeriv a = ai_asymptotic(omega * z);
    ValueDeriv b = ai_asymptotic(w2 * z);
    return {-omega * a.value - w2 * b.value, -w2 * a.deriv - omega * b.deriv};
}

inline ValueDeriv ai_any(cplx z) {
    const double r = std::abs(z);
    if (r <= Tolerances::airy_series_radius) return airy_maclaurin(z, {ai0, aip0});
    if (r >= Tolerances::airy_asymptotic_radius) return ai_far(z);
    cplx dir = z / r;
    if (std::abs(std::arg(z)) < pi / 3.0) {
        cplx from = dir * Tolerances::airy_asymptotic_radius;
        return taylor_walk(ai_far(from), from, z, Tolerances::airy_step, airy_recurrence);
    }
    cplx from = dir * Tolerances::airy_series_radius;
    return taylor_walk(airy_maclaurin(from, {ai0, aip0}), from, z, Tolerances::airy_step, airy_recurrence);
}

}  // namespace detail

/// (Ai, Ai', Bi, Bi'). Wronskian Ai Bi' - Ai' Bi = 1/pi.
inline FunPair airy(cplx z) {
    if (std::abs(z) <= Tolerances::airy_series_radius) {
        ValueDeriv ai = detail::airy_maclaurin(z, {detail::ai0, detail::aip0});
        ValueDeriv bi = detail::airy_maclaurin(z, {detail::sqrt3 * detail::ai0, -detail::sqrt3 * detail::aip0});
        return {ai.value, ai.deriv, bi.value, bi.deriv};
    }
    // Guard before rotating, since Bi overflows where Ai is still representable.
    detail::check_exp_range((2.0 / 3.0) * z * std::sqrt(z));
    ValueDeriv ai = detail::ai_any(z);
    const cplx w = detail::omega, wc = std::conj(detail::omega);
    const cplx e6{detail::sqrt3 / 2.0, 0.5};  // e^{i pi/6}
    ValueDeriv a = detail::ai_any(w * z);
    ValueDeriv b = detail::ai_any(wc * z);
    cplx bi = e6 * a.value + std::conj(e6) * b.value;
    cplx bip = e6 * w * a.deriv + std::conj(e6) * wc * b.deriv;
    if (z.imag() == 0.0) {
        // Real axis: the rotated contributions are complex conjugates.
        bi = bi.real();
        bip = bip.real();
        ai = {ai.value.real(), ai.deriv.real()};
    }
    return {ai.value, ai.deriv, bi, bip};
}

inline FunPair airy(double x) { return airy(cplx(x, 0.0)); }

}  // namespace qwi::specfun

#endif
