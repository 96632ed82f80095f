#ifndef QWI_BASIS_HPP
#define QWI_BASIS_HPP

// Pairs of independent Schrodinger solutions psi'' = q(x) psi, q = (U(x) - E)/(hbar^2/2m*),
// for each segment shape, plus an adaptive-integration fallback.
//
//   constant      exp(+-gamma t), t = x - x_left; cosh(gamma t), sinh(gamma t)/gamma
//                 when |gamma| width < 1e-3 (this includes the gamma = 0 pair {1, t}).
//   linear        Ai(xi), Bi(xi) with xi = alpha (x - x_turn), alpha = cbrt(slope/(hbar^2/2m*)).
//   exponential   J_nu(z), Y_nu(z) with z = beta exp[rate (x + anchor)/2],
//                 beta = (2i/rate) sqrt(A/(hbar^2/2m*)), nu = (2/rate) sqrt((AB - E)/(hbar^2/2m*)).
//                 For imaginary nu, J_nu and Y_nu are close to proportional and the pair
//                 (J_nu, J_-nu) is used instead when it is better conditioned.
//   parabolic     y = x - center, w = sqrt(curvature/(hbar^2/2m*)), eps = (E - offset)/(hbar^2/2m*),
//                 even  e^{-wy^2/2} M(a, 1/2, wy^2),  odd  y e^{-wy^2/2} M(a + 1/2, 3/2, wy^2),
//                 a = 1/4 - eps/(4w). Both are regular at y = 0 and independent of the branch of w.
//   numeric       (1, 0) and (0, 1) at x_left, carried by RKF7(8).
//
// Analytic pairs whose conditioning max(|psi phi'|, |psi' phi|)/|W| exceeds
// max_basis_condition at a segment end raise ConvergenceError so that callers can
// switch to the numeric pair.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <complex>
#include <optional>
#include <string>
#include <variant>

#include "qwi/core.hpp"
#include "qwi/detail/ode.hpp"
#include "qwi/errors.hpp"
#include "qwi/specfun.hpp"

namespace qwi {

enum class BasisKind {
    unspecified,
    constant_exponential,
    constant_hyperbolic,
    linear_airy,
    exponential_bessel_jy,
    exponential_bessel_jj,
    parabolic_even_odd,
    parabolic_whittaker,
    numeric,
};

inline const char* basis_kind_name(BasisKind k) {
    switch (k) {
        case BasisKind::constant_exponential: return "constant_exponential";
        case BasisKind::constant_hyperbolic: return "constant_hyperbolic";
        case BasisKind::linear_airy: return "linear_airy";
        case BasisKind::exponential_bessel_jy: return "exponential_bessel_jy";
        case BasisKind::exponential_bessel_jj: return "exponential_bessel_jj";
        case BasisKind::parabolic_even_odd: return "parabolic_even_odd";
        case BasisKind::parabolic_whittaker: return "parabolic_whittaker";
        case BasisKind::numeric: return "numeric";
        default: return "unspecified";
    }
}

/// Identifies the segment, energy and solution pair a BasisEval belongs to.
struct BasisKey {
    BasisKind kind = BasisKind::unspecified;
    double x_left = 0.0;
    double x_right = 0.0;
    double energy = 0.0;

    friend bool operator==(const BasisKey&, const BasisKey&) = default;
};

struct BasisEval {
    cplx psi;
    cplx psi_deriv;
    cplx phi;
    cplx phi_deriv;
    double x = 0.0;
    BasisKey key{};

    cplx wronskian() const { return psi * phi_deriv - psi_deriv * phi; }
};

inline constexpr double max_basis_condition = 1e6;
inline constexpr double default_numeric_tolerance = 1e-10;
/// Airy arguments beyond this lose phase accuracy in the oscillatory direction.
inline constexpr double max_airy_argument = 1e4;
/// Below this |gamma| * width the constant segment uses the cosh/sinh pair.
inline constexpr double hyperbolic_switch = 1e-3;

/// Largest tolerated |W(x) - W| / |W| for an evaluated pair.
inline constexpr double max_wronskian_mismatch = 1e-6;

/// max(|psi phi'|, |psi' phi|) / |W|: 1 for a perfectly conditioned pair. Infinite when
/// the values are not finite or their Wronskian disagrees with w (underflow, lost digits).
inline double basis_condition(const BasisEval& e, cplx w) {
    const double c = std::max(std::abs(e.psi * e.phi_deriv), std::abs(e.psi_deriv * e.phi)) / std::abs(w);
    const double mismatch = std::abs(e.wronskian() - w) / std::abs(w);
    if (!std::isfinite(c) || !(mismatch <= max_wronskian_mismatch)) return std::numeric_limits<double>::infinity();
    return c;
}

class Basis {
public:
    /// The closed-form pair for the segment's shape (numeric shapes get the numeric pair).
    static Basis analytic(const Segment& seg, double E, const PhysicalConfig& cfg) {
        Basis b(seg, E, cfg);
        const double h2m = cfg.hbar2_over_2m();
        std::visit([&](const auto& s) { b.setup(s, h2m); }, seg.shape);
        return b;
    }

    static Basis numeric(const Segment& seg, double E, const PhysicalConfig& cfg,
                         double tol = default_numeric_tolerance) {
        Basis b(seg, E, cfg);
        b.kind_ = BasisKind::numeric;
        b.tol_ = tol;
        return b;
    }

    /// Whittaker parabolic pair y^{-1/2} M_{k,1/4}(w y^2), y^{-1/2} W_{k,1/4}(w y^2),
    /// k = eps/(4w). Only valid where y = x - center > 0 throughout the segment.
    static Basis whittaker(const Segment& seg, double E, const PhysicalConfig& cfg) {
        const auto* p = std::get_if<Parabolic>(&seg.shape);
        if (!p) throw DomainError("whittaker basis needs a parabolic segment");
        if (!(seg.x_left > p->center)) throw DomainError("whittaker basis needs x > center on the segment");
        if (p->curvature == 0.0) throw DomainError("whittaker basis needs nonzero curvature");
        Basis b(seg, E, cfg);
        b.kind_ = BasisKind::parabolic_whittaker;
        const double h2m = cfg.hbar2_over_2m();
        b.anchor_ = p->center;
        b.omega_ = std::sqrt(cplx(p->curvature / h2m, 0.0));
        b.param_ = (E - p->offset) / h2m / (4.0 * b.omega_);
        return b;
    }

    BasisKind kind() const { return kind_; }
    const Segment& segment() const { return *seg_; }
    double energy() const { return E_; }

    BasisKey key() const { return {kind_, seg_->x_left, seg_->x_right, E_}; }

    BasisEval at(double x) const {
        const double pad = 1e-6 * std::max(1.0, seg_->width());
        if (x < seg_->x_left - pad || x > seg_->x_right + pad)
            throw DomainError("basis evaluated outside its segment at x = " + std::to_string(x));
        for (const auto& c : cache_)
            if (c && c->x == x) return *c;
        BasisEval e = evaluate(x);
        e.x = x;
        e.key = key();
        return e;
    }

    /// Analytic Wronskian psi phi' - psi' phi (constant along the segment).
    cplx wronskian() const {
        switch (kind_) {
            case BasisKind::constant_exponential: return -2.0 * gamma_;
            case BasisKind::constant_hyperbolic: return 1.0;
            case BasisKind::linear_airy: return alpha_ / pi;
            case BasisKind::exponential_bessel_jy: return rate_ / pi;
            case BasisKind::exponential_bessel_jj: return -rate_ * std::sin(nu_ * pi) / pi;
            case BasisKind::parabolic_even_odd: return 1.0;
            case BasisKind::numeric: return 1.0;
            default: return at(seg_->x_left).wronskian();
        }
    }

private:
    Basis(const Segment& seg, double E, const PhysicalConfig& cfg) : seg_(&seg), E_(E), cfg_(cfg) {}

    void setup_constant(double U, double anchor, double h2m) {
        gamma_ = std::sqrt(cplx((U - E_) / h2m, 0.0));
        anchor_ = anchor;
        const double reach = std::max(seg_->x_right - anchor, anchor - seg_->x_left);
        kind_ = std::abs(gamma_) * reach < hyperbolic_switch ? BasisKind::constant_hyperbolic
                                                             : BasisKind::constant_exponential;
    }

    void setup(const Constant& c, double h2m) { setup_constant(c.value, seg_->x_left, h2m); }

    void setup(const Linear& l, double h2m) {
        if (l.slope == 0.0) return setup_constant(l.value_at_left, seg_->x_left, h2m);
        kind_ = BasisKind::linear_airy;
        alpha_ = std::cbrt(l.slope / h2m);
        anchor_ = seg_->x_left + (E_ - l.value_at_left) / l.slope;  // turning point
        for (double x : {seg_->x_left, seg_->x_right})
            if (std::abs(alpha_ * (x - anchor_)) > max_airy_argument)
                throw ConvergenceError("Airy argument out of accurate range", 1.0);
        double c = 0.0;
        for (int i = 0; i < 2; ++i) {
            double x = i == 0 ? seg_->x_left : seg_->x_right;
            BasisEval ev = evaluate(x);
            ev.x = x;
            ev.key = key();
            cache_[i] = ev;
            c = std::max(c, basis_condition(ev, wronskian()));
        }
        if (c > max_basis_condition) throw ConvergenceError("linear-segment basis is ill-conditioned", c * 1.1e-16);
    }

    void setup(const Exponential& e, double h2m) {
        if (e.amplitude == 0.0 || e.rate == 0.0) return setup_constant(seg_->potential(seg_->x_left), seg_->x_left, h2m);
        rate_ = e.rate;
        anchor_ = e.anchor;
        beta_ = cplx(0.0, 2.0 / e.rate) * std::sqrt(cplx(e.amplitude / h2m, 0.0));
        nu_ = (2.0 / e.rate) * std::sqrt(cplx((e.amplitude * e.offset_b - E_) / h2m, 0.0));
        auto worst = [&](BasisKind k) {
            kind_ = k;
            const cplx w = wronskian();
            double c = 0.0;
            for (int i = 0; i < 2; ++i) {
                double x = i == 0 ? seg_->x_left : seg_->x_right;
                BasisEval ev = evaluate(x);
                ev.x = x;
                ev.key = key();
                cache_[i] = ev;
                c = std::max(c, basis_condition(ev, w));
            }
            return c;
        };
        double c_jy = worst(BasisKind::exponential_bessel_jy);
        if (c_jy <= 1e3) return;
        auto jy_cache = cache_;
        double c_jj = std::abs(std::sin(nu_ * pi)) > 1e-3 ? worst(BasisKind::exponential_bessel_jj) : 1e300;
        if (c_jy <= c_jj) {
            kind_ = BasisKind::exponential_bessel_jy;
            cache_ = jy_cache;
        }
        if (std::min(c_jy, c_jj) > max_basis_condition)
            throw ConvergenceError("exponential-segment basis is ill-conditioned", std::min(c_jy, c_jj) * 1.1e-16);
    }

    void setup(const Parabolic& p, double h2m) {
        if (p.curvature == 0.0) return setup_constant(p.offset, p.center, h2m);
        kind_ = BasisKind::parabolic_even_odd;
        anchor_ = p.center;
        omega_ = std::sqrt(cplx(p.curvature / h2m, 0.0));
        param_ = 0.25 - (E_ - p.offset) / h2m / (4.0 * omega_);
        double c = 0.0;
        for (int i = 0; i < 2; ++i) {
            double x = i == 0 ? seg_->x_left : seg_->x_right;
            BasisEval ev = evaluate(x);
            ev.x = x;
            ev.key = key();
            cache_[i] = ev;
            c = std::max(c, basis_condition(ev, 1.0));
        }
        if (c > max_basis_condition)
            throw ConvergenceError("parabolic-segment basis is ill-conditioned", c * 1.1e-16);
    }

    void setup(const Numeric&, double) {
        kind_ = BasisKind::numeric;
        tol_ = default_numeric_tolerance;
    }

    BasisEval evaluate(double x) const {
        switch (kind_) {
            case BasisKind::constant_exponential: {
                const double t = x - anchor_;
                cplx ep = std::exp(gamma_ * t), em = std::exp(-gamma_ * t);
                if (!std::isfinite(std::abs(ep)) || !std::isfinite(std::abs(em)))
                    throw OverflowError("constant-segment exponential overflows");
                return {ep, gamma_ * ep, em, -gamma_ * em};
            }
            case BasisKind::constant_hyperbolic: {
                const double t = x - anchor_;
                if (gamma_ == cplx(0.0)) return {1.0, 0.0, t, 1.0};
                cplx c = std::cosh(gamma_ * t), s = std::sinh(gamma_ * t);
                return {c, gamma_ * s, s / gamma_, c};
            }
            case BasisKind::linear_airy: {
                specfun::FunPair a = specfun::airy(alpha_ * (x - anchor_));
                return {a.first, alpha_ * a.first_deriv, a.second, alpha_ * a.second_deriv};
            }
            case BasisKind::exponential_bessel_jy: {
                const cplx z = beta_ * std::exp(0.5 * rate_ * (x + anchor_));
                const cplx dz = 0.5 * rate_ * z;
                specfun::FunPair b = specfun::bessel_jy(nu_, z);
                return {b.first, dz * b.first_deriv, b.second, dz * b.second_deriv};
            }
            case BasisKind::exponential_bessel_jj: {
                const cplx z = beta_ * std::exp(0.5 * rate_ * (x + anchor_));
                const cplx dz = 0.5 * rate_ * z;
                specfun::ValueDeriv p = specfun::bessel_j(nu_, z), m = specfun::bessel_j(-nu_, z);
                return {p.value, dz * p.deriv, m.value, dz * m.deriv};
            }
            case BasisKind::parabolic_even_odd: {
                const double y = x - anchor_;
                const cplx u = omega_ * y * y;
                const cplx du = 2.0 * omega_ * y;
                const cplx e = std::exp(-0.5 * u);
                specfun::ValueDeriv m1 = specfun::kummer_m(param_, 0.5, u);
                specfun::ValueDeriv m2 = specfun::kummer_m(param_ + 0.5, 1.5, u);
                cplx even = e * m1.value;
                cplx even_d = du * e * (m1.deriv - 0.5 * m1.value);
                cplx odd = y * e * m2.value;
                cplx odd_d = e * m2.value + y * du * e * (m2.deriv - 0.5 * m2.value);
                return {even, even_d, odd, odd_d};
            }
            case BasisKind::parabolic_whittaker: {
                const double y = x - anchor_;
                if (!(y > 0.0)) throw DomainError("whittaker basis needs x > center");
                const cplx u = omega_ * y * y;
                const cplx du = 2.0 * omega_ * y;
                specfun::FunPair w = specfun::whittaker(param_, 0.25, u);
                const double s = 1.0 / std::sqrt(y);
                const double ds = -0.5 * s / y;
                return {s * w.first, ds * w.first + s * du * w.first_deriv, s * w.second,
                        ds * w.second + s * du * w.second_deriv};
            }
            case BasisKind::numeric: return evaluate_numeric(x);
            default: throw DomainError("uninitialised basis");
        }
    }

    BasisEval evaluate_numeric(double x) const {
        const Segment& seg = *seg_;
        const double h2m = cfg_.hbar2_over_2m();
        const double E = E_;
        using State = std::array<double, 4>;
        State y{1.0, 0.0, 0.0, 1.0};
        auto sys = [&seg, h2m, E](const State& s, State& d, double t) {
            const double q = (seg.potential(t) - E) / h2m;
            d[0] = s[1];
            d[1] = q * s[0];
            d[2] = s[3];
            d[3] = q * s[2];
        };
        detail::integrate_rkf78(sys, y, seg.x_left, x, tol_);
        return {y[0], y[1], y[2], y[3]};
    }

    const Segment* seg_;
    double E_;
    PhysicalConfig cfg_;
    BasisKind kind_ = BasisKind::unspecified;
    double tol_ = default_numeric_tolerance;
    cplx gamma_{};
    double alpha_ = 0.0;
    double anchor_ = 0.0;
    double rate_ = 0.0;
    cplx beta_{}, nu_{}, omega_{}, param_{};
    std::array<std::optional<BasisEval>, 2> cache_{};
};

namespace detail {
template <class S>
void require_shape(const Segment& seg, const char* name) {
    if (!std::holds_alternative<S>(seg.shape))
        throw DomainError(std::string(name) + ": segment has shape " + shape_name(seg.shape));
}
}  // namespace detail

inline BasisEval basis_constant(const Segment& seg, double E, double x, const PhysicalConfig& cfg) {
    detail::require_shape<Constant>(seg, "basis_constant");
    return Basis::analytic(seg, E, cfg).at(x);
}

inline BasisEval basis_linear(const Segment& seg, double E, double x, const PhysicalConfig& cfg) {
    detail::require_shape<Linear>(seg, "basis_linear");
    return Basis::analytic(seg, E, cfg).at(x);
}

inline BasisEval basis_exponential(const Segment& seg, double E, double x, const PhysicalConfig& cfg) {
    detail::require_shape<Exponential>(seg, "basis_exponential");
    return Basis::analytic(seg, E, cfg).at(x);
}

inline BasisEval basis_parabolic(const Segment& seg, double E, double x, const PhysicalConfig& cfg) {
    detail::require_shape<Parabolic>(seg, "basis_parabolic");
    return Basis::analytic(seg, E, cfg).at(x);
}

inline BasisEval basis_numeric(const Segment& seg, double E, double x, const PhysicalConfig& cfg,
                               double tol = default_numeric_tolerance) {
    return Basis::numeric(seg, E, cfg, tol).at(x);
}

}  // namespace qwi

#endif
