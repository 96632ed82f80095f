#ifndef QWI_CORE_HPP
#define QWI_CORE_HPP

// Physical configuration, potential profiles, and the wavevector/impedance
// primitives shared by the rest of the library.
//
// Units: energies in eV, lengths in nm, masses in units of the bare electron
// mass. Impedances are velocities in m/s.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qwi/errors.hpp"

namespace qwi {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct PhysicalConfig {
    /// hbar^2 / (2 m0) in eV nm^2 (CODATA 2018).
    double hbar2_over_2m0 = 0.0380998;
    /// m* / m0.
    double effective_mass_ratio = 0.1;
    /// hbar in eV s. Only used to express impedances in velocity units.
    double hbar_eV_s = 6.582119569e-16;

    /// hbar^2 / (2 m*) in eV nm^2.
    double hbar2_over_2m() const { return hbar2_over_2m0 / effective_mass_ratio; }

    /// hbar / m* in m nm / s; Z [m/s] = (hbar/(i m)) * (psi'/psi) [1/nm].
    double velocity_scale() const { return 2.0 * hbar2_over_2m() / hbar_eV_s * 1e-9; }

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (!(hbar2_over_2m0 > 0.0)) v.emplace_back("hbar2_over_2m0 must be > 0");
        if (!(effective_mass_ratio > 0.0)) v.emplace_back("effective_mass_ratio must be > 0");
        if (!(hbar_eV_s > 0.0)) v.emplace_back("hbar_eV_s must be > 0");
        return v;
    }
};

// ---------------------------------------------------------------------------
// Segment shapes

struct Constant {
    double value;  // eV
    double operator()(double) const { return value; }
};

/// value_at_left + slope * (x - x_left)
struct Linear {
    double value_at_left;  // eV
    double slope;          // eV/nm
    double x_left = 0.0;   // filled in from the owning segment
    double operator()(double x) const { return value_at_left + slope * (x - x_left); }
};

/// offset + curvature * (x - center)^2. A negative curvature gives a parabolic hump.
struct Parabolic {
    double curvature;    // eV/nm^2
    double center;       // nm
    double offset = 0.0; // eV
    double operator()(double x) const { return offset + curvature * (x - center) * (x - center); }
};

/// amplitude * (exp[rate * (x + anchor)] + offset_b)
struct Exponential {
    double amplitude;  // eV
    double offset_b;   // dimensionless
    double rate;       // 1/nm
    double anchor;     // nm
    double operator()(double x) const {
        return amplitude * (std::exp(rate * (x + anchor)) + offset_b);
    }
};

/// Arbitrary potential, either a callable or piecewise-linear samples.
struct Numeric {
    std::function<double(double)> fn;
    std::vector<std::pair<double, double>> samples;  // (x nm, U eV), sorted by x

    static Numeric from_callable(std::function<double(double)> f) { return Numeric{std::move(f), {}}; }

    static Numeric from_samples(std::vector<std::pair<double, double>> pts) {
        std::sort(pts.begin(), pts.end());
        Numeric n;
        n.samples = pts;
        n.fn = [pts = std::move(pts)](double x) {
            if (pts.empty()) return 0.0;
            if (x <= pts.front().first) return pts.front().second;
            if (x >= pts.back().first) return pts.back().second;
            auto hi = std::upper_bound(pts.begin(), pts.end(), x,
                                       [](double v, const auto& p) { return v < p.first; });
            auto lo = hi - 1;
            double t = (x - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
        };
        return n;
    }

    double operator()(double x) const { return fn ? fn(x) : 0.0; }
};

using Shape = std::variant<Constant, Linear, Parabolic, Exponential, Numeric>;

struct Segment {
    double x_left;
    double x_right;
    Shape shape;

    Segment(double xl, double xr, Shape s) : x_left(xl), x_right(xr), shape(std::move(s)) {
        if (auto* lin = std::get_if<Linear>(&shape)) lin->x_left = x_left;
    }

    double width() const { return x_right - x_left; }
    double potential(double x) const {
        return std::visit([x](const auto& s) { return s(x); }, shape);
    }
    bool is_constant() const { return std::holds_alternative<Constant>(shape); }
};

inline std::string shape_name(const Shape& s) {
    switch (s.index()) {
        case 0: return "constant";
        case 1: return "linear";
        case 2: return "parabolic";
        case 3: return "exponential";
        default: return "numeric";
    }
}

// ---------------------------------------------------------------------------
// Potential profile: two semi-infinite constant leads around contiguous segments.
// With no segments the single interface sits at x = 0.

struct PotentialProfile {
    double lead_left = 0.0;
    double lead_right = 0.0;
    std::vector<Segment> segments;

    double x_begin() const { return segments.empty() ? 0.0 : segments.front().x_left; }
    double x_end() const { return segments.empty() ? 0.0 : segments.back().x_right; }

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto& s = segments[i];
            if (!(s.x_left <= s.x_right))
                v.push_back("segment " + std::to_string(i) + ": x_left > x_right");
            if (i + 1 < segments.size() && s.x_right != segments[i + 1].x_left)
                v.push_back("segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " are not contiguous (" + std::to_string(s.x_right) + " vs " +
                            std::to_string(segments[i + 1].x_left) + ")");
            if (const auto* n = std::get_if<Numeric>(&s.shape); n && !n->fn)
                v.push_back("segment " + std::to_string(i) + ": numeric shape without potential");
        }
        return v;
    }

    void validate() const {
        if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
    }
};

/// U(x). Interfaces are half-open [x_left, x_right): at an interface the right-hand
/// value is returned.
inline double potential_at(const PotentialProfile& profile, double x) {
    if (profile.segments.empty()) return x < 0.0 ? profile.lead_left : profile.lead_right;
    if (x < profile.x_begin()) return profile.lead_left;
    if (x >= profile.x_end()) return profile.lead_right;
    for (const auto& s : profile.segments)
        if (x >= s.x_left && x < s.x_right) return s.potential(x);
    return profile.lead_right;
}

/// gamma = sqrt((U - E) / (hbar^2/2m*)), principal branch. Positive real under a
/// barrier, +i k in a propagating region.
inline cplx wavevector(double E, double U, const PhysicalConfig& cfg) {
    return std::sqrt(cplx((U - E) / cfg.hbar2_over_2m(), 0.0));
}

/// Characteristic impedance sqrt(2(E - U)/m*) in m/s, principal branch.
/// Satisfies z * (i m / hbar) = gamma for E > U and = -gamma for E < U.
inline cplx lead_impedance(double E, double U_lead, const PhysicalConfig& cfg) {
    return cfg.velocity_scale() * std::sqrt(cplx((E - U_lead) / cfg.hbar2_over_2m(), 0.0));
}

// ---------------------------------------------------------------------------
// Projective impedance.
//
// (numerator, denominator) holds the logarithmic derivative psi'/psi up to a common
// complex factor, so Z = (hbar/(i m)) * numerator / denominator. log_scale tracks
// the magnitude that was divided out during normalisation: the underlying wave
// state (psi', psi) is exp(log_scale) * (numerator, denominator) up to a phase.
// Only the chain's transmission path reads log_scale.

struct ImpedanceState {
    cplx numerator{0.0, 0.0};
    cplx denominator{1.0, 0.0};
    double log_scale = 0.0;

    static ImpedanceState from_log_derivative(cplx lambda) { return ImpedanceState{lambda, 1.0, 0.0}; }

    static ImpedanceState from_impedance(cplx z, const PhysicalConfig& cfg) {
        // psi'/psi = (i m / hbar) Z
        return from_log_derivative(cplx(0.0, 1.0) * z / cfg.velocity_scale());
    }

    /// State of the wave (psi', psi) itself, magnitude included.
    static ImpedanceState from_wave(cplx psi_deriv, cplx psi) {
        ImpedanceState s{psi_deriv, psi, 0.0};
        s.normalize();
        return s;
    }

    bool valid() const {
        return std::isfinite(numerator.real()) && std::isfinite(numerator.imag()) &&
               std::isfinite(denominator.real()) && std::isfinite(denominator.imag()) &&
               (numerator != cplx(0.0) || denominator != cplx(0.0));
    }

    /// psi'/psi; infinite at a pole.
    cplx log_derivative() const {
        if (denominator == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
        return numerator / denominator;
    }

    cplx impedance(const PhysicalConfig& cfg) const {
        if (denominator == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
        return cfg.velocity_scale() * numerator / (cplx(0.0, 1.0) * denominator);
    }

    /// Rescale so the larger component has unit magnitude.
    void normalize() {
        double m = std::max(std::abs(numerator), std::abs(denominator));
        if (m > 0.0 && std::isfinite(m)) {
            numerator /= m;
            denominator /= m;
            log_scale += std::log(m);
        }
    }
};

/// |n1 d2 - n2 d1| / (|(n1,d1)| |(n2,d2)|); zero iff the two states are the same point.
inline double projective_distance(const ImpedanceState& a, const ImpedanceState& b) {
    double na = std::hypot(std::abs(a.numerator), std::abs(a.denominator));
    double nb = std::hypot(std::abs(b.numerator), std::abs(b.denominator));
    return std::abs(a.numerator * b.denominator - b.numerator * a.denominator) / (na * nb);
}

}  // namespace qwi

#endif
