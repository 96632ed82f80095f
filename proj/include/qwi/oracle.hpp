#ifndef QWI_ORACLE_HPP
#define QWI_ORACLE_HPP

// Validation paths that share nothing with the special-function chain.
//
// Riccati form. With lambda = psi'/psi = (i m/hbar) Z and q = (U - E)/(hbar^2/2m*),
//
//   lambda' = q - lambda^2,     i.e.   Z' = (i m/hbar) (z0^2 - Z^2),  z0^2 = 2(E - U)/m*.
//
// lambda has poles wherever psi vanishes, so the integrator switches to mu = 1/lambda
// (mu' = 1 - q mu^2) whenever |lambda| > 1 nm^-1 and back when |mu| > 1 nm.
//
// Flux form. A flux-carrying wave never vanishes, and with lambda = a + i b (b > 0)
//
//   a' = q - a^2 + b^2,     (ln b)' = -2a,
//
// which is pole-free in exact arithmetic. When b is tiny, a still swings through
// values of order k^2/b, so the same lambda/mu chart switch is applied with
// mu = c + i d and (c, ln|d|) as variables:
//
//   c' = 1 - q (c^2 - d^2),     (ln|d|)' = -2 q c.
//
// Starting from the outgoing load i k_R, b at the input end is
// the flux divided by |psi|^2, which gives T = 4 k_L b / |i k_L + lambda|^2 directly.
//
// Both are integrated segment by segment with RKF7(8).
//
// Staircase. Each non-constant segment is replaced by constant steps sampled at their
// midpoints.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <variant>

#include "qwi/core.hpp"
#include "qwi/detail/ode.hpp"
#include "qwi/errors.hpp"

namespace qwi {

struct RiccatiResult {
    ImpedanceState state;
    /// Projective distance between the runs at tol and at 10 tol.
    double error_estimate = 0.0;
};

namespace detail {

inline ImpedanceState riccati_run(const PotentialProfile& profile, double E, const ImpedanceState& load, double tol,
                                  const PhysicalConfig& cfg) {
    const double h2m = cfg.hbar2_over_2m();
    using State = std::array<double, 2>;  // active chart variable, lambda or mu
    bool mu_chart = std::abs(load.numerator) > std::abs(load.denominator);
    cplx w = mu_chart ? load.denominator / load.numerator : load.numerator / load.denominator;
    State y{w.real(), w.imag()};
    for (std::size_t k = profile.segments.size(); k-- > 0;) {
        const Segment& seg = profile.segments[k];
        auto sys = [&seg, &mu_chart, E, h2m](const State& s, State& d, double x) {
            const double q = (seg.potential(x) - E) / h2m;
            const cplx v(s[0], s[1]);
            const cplx dv = mu_chart ? 1.0 - q * v * v : q - v * v;
            d = {dv.real(), dv.imag()};
        };
        auto after = [&mu_chart](State& s, double) {
            const cplx v(s[0], s[1]);
            if (std::abs(v) > 1.0) {
                const cplx inv = 1.0 / v;
                s[0] = inv.real();
                s[1] = inv.imag();
                mu_chart = !mu_chart;
            }
        };
        integrate_rkf78(sys, y, seg.x_right, seg.x_left, tol, after);
    }
    const cplx v(y[0], y[1]);
    ImpedanceState out = mu_chart ? ImpedanceState{1.0, v, 0.0} : ImpedanceState{v, 1.0, 0.0};
    out.normalize();
    out.log_scale = 0.0;
    return out;
}

}  // namespace detail

/// Integrate the Riccati equation from the load at the right end of the profile to the
/// left end. Returns the projective state there together with an error estimate.
inline RiccatiResult riccati_integrate(const PotentialProfile& profile, double E, const ImpedanceState& load, double tol,
                                       const PhysicalConfig& cfg) {
    if (!(tol > 0.0)) throw DomainError("riccati_integrate: tol must be positive");
    ImpedanceState fine = detail::riccati_run(profile, E, load, tol, cfg);
    ImpedanceState coarse = detail::riccati_run(profile, E, load, 10.0 * tol, cfg);
    return {fine, projective_distance(fine, coarse)};
}

inline RiccatiResult riccati_integrate(const PotentialProfile& profile, double E, cplx z_load, double tol,
                                       const PhysicalConfig& cfg) {
    return riccati_integrate(profile, E, ImpedanceState::from_impedance(z_load, cfg), tol, cfg);
}

struct OracleTransmission {
    double T = 0.0;
    double R = 0.0;
    cplx log_derivative{};  // psi'/psi at the left end
};

/// Transmission for incidence from the left by the flux form. Zero when either lead
/// is evanescent or at threshold.
inline OracleTransmission riccati_transmission(const PotentialProfile& profile, double E, const PhysicalConfig& cfg,
                                               double tol = 1e-10) {
    const double h2m = cfg.hbar2_over_2m();
    if (!(E > profile.lead_left) || !(E > profile.lead_right)) return {0.0, 1.0, {}};
    const double kl = std::sqrt((E - profile.lead_left) / h2m);
    const double kr = std::sqrt((E - profile.lead_right) / h2m);
    using State = std::array<double, 2>;  // Re v, ln |Im v| with v = lambda or mu
    State y{0.0, std::log(kr)};
    bool mu_chart = false;
    for (std::size_t k = profile.segments.size(); k-- > 0;) {
        const Segment& seg = profile.segments[k];
        auto sys = [&seg, &mu_chart, E, h2m](const State& s, State& d, double x) {
            const double q = (seg.potential(x) - E) / h2m;
            const double im = std::exp(s[1]);
            if (mu_chart)
                d = {1.0 - q * (s[0] * s[0] - im * im), -2.0 * q * s[0]};
            else
                d = {q - s[0] * s[0] + im * im, -2.0 * s[0]};
        };
        auto after = [&mu_chart](State& s, double) {
            const double im = std::exp(s[1]);
            const double norm2 = s[0] * s[0] + im * im;
            if (norm2 > 1.0) {
                s[0] /= norm2;
                s[1] -= std::log(norm2);
                mu_chart = !mu_chart;
            }
        };
        detail::integrate_rkf78(sys, y, seg.x_right, seg.x_left, tol, after);
    }
    if (mu_chart) {
        const double norm2 = y[0] * y[0] + std::exp(2.0 * y[1]);
        y[0] /= norm2;
        y[1] -= std::log(norm2);
    }
    const cplx lambda(y[0], std::exp(y[1]));
    const cplx ik(0.0, kl);
    OracleTransmission out;
    out.T = 4.0 * kl * lambda.imag() / std::norm(ik + lambda);
    out.R = std::norm(ik - lambda) / std::norm(ik + lambda);
    out.log_derivative = lambda;
    return out;
}

/// Plane-wave transfer for profiles made only of constant segments: (psi, psi') is
/// carried from the right lead to the left with the cos/sin propagator of each region.
/// Incidence from the left. Throws DomainError for any non-constant segment.
inline OracleTransmission transfer_matrix_transmission(const PotentialProfile& profile, double E,
                                                       const PhysicalConfig& cfg) {
    const double h2m = cfg.hbar2_over_2m();
    if (!(E > profile.lead_left) || !(E > profile.lead_right)) return {0.0, 1.0, {}};
    const double kl = std::sqrt((E - profile.lead_left) / h2m);
    const double kr = std::sqrt((E - profile.lead_right) / h2m);
    cplx psi = 1.0, dpsi(0.0, kr);
    for (std::size_t j = profile.segments.size(); j-- > 0;) {
        const Segment& seg = profile.segments[j];
        const auto* c = std::get_if<Constant>(&seg.shape);
        if (!c) throw DomainError("transfer_matrix_transmission: constant segments only");
        const cplx k = std::sqrt(cplx((E - c->value) / h2m, 0.0));
        const double t = -seg.width();
        const cplx kt = k * t;
        const cplx cs = std::cos(kt);
        const cplx sinc = std::abs(kt) < 1e-4 ? t * (1.0 - kt * kt / 6.0) : std::sin(kt) / k;  // sin(kt)/k
        const cplx p = cs * psi + sinc * dpsi;
        const cplx dp = -k * k * sinc * psi + cs * dpsi;
        psi = p;
        dpsi = dp;
    }
    const cplx ik(0.0, kl);
    const cplx incident = 0.5 * (psi + dpsi / ik), reflected = 0.5 * (psi - dpsi / ik);
    OracleTransmission out;
    out.T = kr / kl / std::norm(incident);
    out.R = std::norm(reflected) / std::norm(incident);
    out.log_derivative = dpsi / psi;
    return out;
}

struct StaircaseProfile {
    PotentialProfile source;
    int steps_per_segment = 1;
    PotentialProfile profile;  // constant segments only
};

inline StaircaseProfile staircase(const PotentialProfile& source, int steps_per_segment) {
    if (steps_per_segment < 1) throw DomainError("staircase: steps_per_segment must be >= 1");
    StaircaseProfile s{source, steps_per_segment, {source.lead_left, source.lead_right, {}}};
    for (const auto& seg : source.segments) {
        if (seg.is_constant()) {
            s.profile.segments.push_back(seg);
            continue;
        }
        const int n = seg.width() > 0.0 ? steps_per_segment : 1;
        for (int i = 0; i < n; ++i) {
            const double a = i == 0 ? seg.x_left : seg.x_left + seg.width() * i / n;
            const double b = i + 1 == n ? seg.x_right : seg.x_left + seg.width() * (i + 1) / n;
            s.profile.segments.emplace_back(a, b, Constant{seg.potential(0.5 * (a + b))});
        }
    }
    return s;
}

}  // namespace qwi

#endif
