#ifndef QWI_SPECFUN_KUMMER_HPP
#define QWI_SPECFUN_KUMMER_HPP

// Confluent hypergeometric functions M(a,b,z) (Kummer) and U(a,b,z) (Tricomi),
// and the Whittaker functions built on them.
//
// M:  |z| <= kummer_series_radius   ascending series, through Kummer's transformation
//                                   M(a,b,z) = e^z M(b-a,b,-z) when Re z < 0;
//     otherwise                     Taylor stepping of z w'' + (b-z) w' - a w = 0
//                                   outward along the ray, again in Re z >= 0 only.
// U:  |z| >= kummer_asymptotic_radius   asymptotic series z^{-a} 2F0(a, a-b+1; ; -1/z);
//     otherwise                         connection formula in M, or, where that
//                                       cancels (Re z >> 0), Taylor stepping inward
//                                       from the asymptotic radius. Stepping is
//                                       also used on and just left of the imaginary
//                                       axis.
//
// Accuracy domain: |arg z| <= pi/2. U is good to ~1e-10 relative there; M and U grow
// apart like e^z, so the Wronskian is accurate relative to |M U'|.
//
// Near-integer b in the connection formula uses the same Richardson scheme as the
// Bessel Y limit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "qwi/errors.hpp"
#include "qwi/specfun/bessel.hpp"
#include "qwi/specfun/funpair.hpp"
#include "qwi/specfun/gamma.hpp"
#include "qwi/specfun/taylor.hpp"
#include "qwi/specfun/tolerances.hpp"

namespace qwi::specfun {

namespace detail {

inline bool nonpositive_integer(cplx a) {
    double n = std::round(a.real());
    return n <= 0.0 && a == cplx(n, 0.0);
}

// sum_k (a)_k/(b)_k z^k/k! and its derivative sum_k (a)_{k+1}/(b)_{k+1} z^k/k!.
inline SeriesResult kummer_series(cplx a, cplx b, cplx z) {
    cplx t = 1.0, d = a / b;
    cplx sum = t, dsum = d;
    double abs_sum = 1.0, abs_dsum = std::abs(d);
    int small_run = 0;
    for (int k = 1; k < Tolerances::max_series_terms; ++k) {
        t *= (a + double(k - 1)) / (b + double(k - 1)) * z / double(k);
        d *= (a + double(k)) / (b + double(k)) * z / double(k);
        sum += t;
        dsum += d;
        abs_sum += std::abs(t);
        abs_dsum += std::abs(d);
        if (t == cplx(0.0) && d == cplx(0.0)) break;  // a is a non-positive integer
        bool tiny = std::abs(t) <= Tolerances::series_term * std::abs(sum) &&
                    std::abs(d) <= Tolerances::series_term * std::abs(dsum);
        bool past_peak = double(k) > std::abs(z) && double(k) > std::abs(a) - std::abs(b);
        small_run = (tiny && past_peak) ? small_run + 1 : 0;
        if (small_run >= 2) break;
        if (k + 1 == Tolerances::max_series_terms) throw ConvergenceError("Kummer series", std::abs(t));
    }
    double c = std::max(abs_sum / std::max(std::abs(sum), 1e-300),
                        abs_dsum / std::max(std::abs(dsum), 1e-300));
    return {sum, dsum, c};
}

inline auto kummer_recurrence(cplx a, cplx b, cplx z0) {
    // z w'' + (b - z) w' - a w = 0 about z0 != 0.
    return [a, b, z0](int n, cplx, cplx, cplx c0, cplx c1) {
        const double m = n;
        return ((m + a) * c0 - (m + 1.0) * (m + b - z0) * c1) / (z0 * (m + 1.0) * (m + 2.0));
    };
}

inline ValueDeriv kummer_walk(cplx a, cplx b, ValueDeriv start, cplx from, cplx to) {
    double step = std::min(Tolerances::kummer_max_step, 0.5 * std::min(std::abs(from), std::abs(to)));
    return taylor_walk(start, from, to, step, [a, b](cplx z0) { return kummer_recurrence(a, b, z0); });
}

// M and M' for Re z >= 0.
inline ValueDeriv kummer_m_right(cplx a, cplx b, cplx z) {
    const double r = std::abs(z);
    if (r <= Tolerances::kummer_series_radius) {
        SeriesResult s = kummer_series(a, b, z);
        if (s.cancellation > Tolerances::max_cancellation)
            throw ConvergenceError("Kummer series cancellation", s.cancellation * 1.1e-16);
        return {s.value, s.deriv};
    }
    cplx from = z / r * Tolerances::kummer_series_radius;
    return kummer_walk(a, b, kummer_m_right(a, b, from), from, z);
}

inline ValueDeriv kummer_m(cplx a, cplx b, cplx z) {
    if (std::abs(z.real()) > Tolerances::exp_guard) throw OverflowError("Kummer M overflows");
    if (z.real() >= 0.0) return kummer_m_right(a, b, z);
    // M(a,b,z) = e^z M(b-a,b,-z)
    ValueDeriv m = kummer_m_right(b - a, b, -z);
    cplx e = std::exp(z);
    return {e * m.value, e * (m.value - m.deriv)};
}

// U, U' from z^{-a} sum_k (a)_k (a-b+1)_k / k! (-1/z)^k, with U' = -a U(a+1, b+1, z).
inline ValueDeriv kummer_u_asymptotic(cplx a, cplx b, cplx z) {
    const cplx c = a - b + 1.0;
    cplx t = 1.0, td = 1.0, s = 1.0, sd = 1.0;
    double last = 1e300;
    bool converged = false;
    for (int k = 1; k < 400; ++k) {
        t *= -(a + double(k - 1)) * (c + double(k - 1)) / (double(k) * z);
        td *= -(a + double(k)) * (c + double(k - 1)) / (double(k) * z);
        double mag = std::max(std::abs(t), std::abs(td));
        if (mag == 0.0) {
            converged = true;
            break;
        }
        if (mag > last) break;
        s += t;
        sd += td;
        last = mag;
        if (mag < Tolerances::series_term) {
            converged = true;
            break;
        }
    }
    if (!converged && last > Tolerances::asymptotic_term) throw ConvergenceError("Kummer U asymptotic", last);
    cplx za = std::pow(z, -a);
    return {za * s, -a * za / z * sd};
}

inline ValueDeriv kummer_u_connection_generic(cplx a, cplx b, cplx z) {
    // U = G(1-b)/G(a-b+1) M(a,b,z) + G(b-1)/G(a) z^{1-b} M(a-b+1, 2-b, z)
    cplx c1 = gamma(1.0 - b) * rgamma(a - b + 1.0);
    cplx c2 = gamma(b - 1.0) * rgamma(a);
    ValueDeriv m1 = kummer_m(a, b, z);
    cplx v = c1 * m1.value, dv = c1 * m1.deriv;
    cplx w = 0.0, dw = 0.0;
    if (c2 != cplx(0.0)) {
        ValueDeriv m2 = kummer_m(a - b + 1.0, 2.0 - b, z);
        cplx zp = std::pow(z, 1.0 - b);
        w = c2 * zp * m2.value;
        dw = c2 * ((1.0 - b) * zp / z * m2.value + zp * m2.deriv);
    }
    cplx u = v + w, du = dv + dw;
    double loss = std::max({std::abs(v), std::abs(w)}) / std::max(std::abs(u), 1e-300);
    double dloss = std::max({std::abs(dv), std::abs(dw)}) / std::max(std::abs(du), 1e-300);
    if (std::max(loss, dloss) > Tolerances::max_cancellation)
        throw ConvergenceError("Kummer U connection cancellation", std::max(loss, dloss) * 1.1e-16);
    return {u, du};
}

inline ValueDeriv kummer_u_connection(cplx a, cplx b, cplx z) {
    double n;
    if (!near_integer(b, Tolerances::integer_window, &n)) return kummer_u_connection_generic(a, b, z);
    const double e = Tolerances::limit_offset;
    ValueDeriv p1 = kummer_u_connection_generic(a, n + e, z), m1 = kummer_u_connection_generic(a, n - e, z);
    ValueDeriv p2 = kummer_u_connection_generic(a, n + 2 * e, z), m2 = kummer_u_connection_generic(a, n - 2 * e, z);
    cplx d = b - n;
    auto extrap = [&](cplx ValueDeriv::*f) {
        cplx center = (4.0 * (p1.*f + m1.*f) - (p2.*f + m2.*f)) / 6.0;
        cplx slope = (8.0 * (p1.*f - m1.*f) - (p2.*f - m2.*f)) / (12.0 * e);
        return center + d * slope;
    };
    return {extrap(&ValueDeriv::value), extrap(&ValueDeriv::deriv)};
}

// Asymptotic start point on the ray through z, pushed outward until the expansion
// converges (large |a| needs a larger radius).
inline std::pair<cplx, ValueDeriv> kummer_u_far_start(cplx a, cplx b, cplx z) {
    double radius = std::max(Tolerances::kummer_asymptotic_radius, std::abs(z));
    for (int attempt = 0;; ++attempt) {
        cplx from = z / std::abs(z) * radius;
        try {
            return {from, kummer_u_asymptotic(a, b, from)};
        } catch (const ConvergenceError&) {
            if (attempt == 3) throw;
            radius *= 2.0;
        }
    }
}

// Walking inward from the asymptotic radius amplifies errors along e^z z^{a-b} by
// exp(Re z - Re from); tolerated up to e^2, so the imaginary axis is walkable.
inline bool kummer_walk_stable(cplx z) {
    return z.real() / std::abs(z) * Tolerances::kummer_asymptotic_radius > -2.0;
}

inline ValueDeriv kummer_u(cplx a, cplx b, cplx z) {
    const double r = std::abs(z);
    if (r >= Tolerances::kummer_asymptotic_radius) {
        try {
            return kummer_u_asymptotic(a, b, z);
        } catch (const ConvergenceError&) {
            if (!kummer_walk_stable(z)) return kummer_u_connection(a, b, z);
        }
    } else {
        try {
            return kummer_u_connection(a, b, z);
        } catch (const ConvergenceError&) {
            if (!kummer_walk_stable(z)) throw;
        }
    }
    auto [from, start] = kummer_u_far_start(a, b, z);
    return kummer_walk(a, b, start, from, z);
}

}  // namespace detail

/// (M, M', U, U') of the confluent hypergeometric equation z w'' + (b - z) w' - a w = 0.
/// Wronskian M U' - M' U = -Gamma(b)/Gamma(a) z^{-b} e^z.
/// A b at a non-positive integer is moved off the pole by 1e-8.
inline FunPair kummer(cplx a, cplx b, cplx z) {
    if (z == cplx(0.0)) throw DomainError("kummer: U(a,b,z) is singular at z = 0");
    if (detail::nonpositive_integer(b)) b += 1e-8;
    ValueDeriv m = detail::kummer_m(a, b, z);
    ValueDeriv u = detail::kummer_u(a, b, z);
    return {m.value, m.deriv, u.value, u.deriv};
}

/// M(a,b,z) and M' only; defined at z = 0.
inline ValueDeriv kummer_m(cplx a, cplx b, cplx z) {
    if (detail::nonpositive_integer(b)) b += 1e-8;
    return detail::kummer_m(a, b, z);
}

/// (M_{k,m}, M_{k,m}', W_{k,m}, W_{k,m}') with
///   M_{k,m}(z) = e^{-z/2} z^{m+1/2} M(m-k+1/2, 1+2m, z),
///   W_{k,m}(z) = e^{-z/2} z^{m+1/2} U(m-k+1/2, 1+2m, z).
/// Wronskian -Gamma(1+2m)/Gamma(m-k+1/2).
inline FunPair whittaker(cplx kappa, cplx mu, cplx z) {
    if (z == cplx(0.0)) throw DomainError("whittaker: z = 0");
    const cplx c = mu + 0.5;
    FunPair k = kummer(c - kappa, 1.0 + 2.0 * mu, z);
    cplx pre = std::exp(-0.5 * z) * std::pow(z, c);
    cplx dlog = -0.5 + c / z;
    return {pre * k.first, pre * (dlog * k.first + k.first_deriv), pre * k.second,
            pre * (dlog * k.second + k.second_deriv)};
}

}  // namespace qwi::specfun

#endif
