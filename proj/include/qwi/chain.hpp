#ifndef QWI_CHAIN_HPP
#define QWI_CHAIN_HPP

// Interface-matching algebra. A segment [x_l, x_r] with solution pair (psi, phi) is
// summarised by the two-point function
//
//   f(x_l, x_r) = phi(x_l) psi(x_r) - phi(x_r) psi(x_l)
//
// and its partial derivatives. If the wave has log-derivative n/d at one end, then
// at the other end (W = psi phi' - psi' phi):
//
//   forward  (known at x_l):  (u', u)(x_r) = ( d_both d - d_right n,  d_left d - f n ) / W
//   backward (known at x_r):  (u', u)(x_l) = ( d_both d - d_left n,   d_right d - f n ) / (-W)
//
// so every step is a Mobius map on the projective pair (n, d). The 1/W factors only
// matter for the wave magnitude, which ImpedanceState::log_scale keeps track of.

#include <cmath>
#include <complex>
#include <vector>

#include "qwi/basis.hpp"
#include "qwi/core.hpp"
#include "qwi/errors.hpp"

namespace qwi {

struct FBlock {
    cplx f;
    cplx d_left;   // df/dx_l
    cplx d_right;  // df/dx_r
    cplx d_both;   // d^2 f / dx_l dx_r
    cplx wronskian{1.0, 0.0};
};

inline FBlock two_point_f(const BasisEval& l, const BasisEval& r) {
    if (!(l.key == r.key))
        throw BasisMismatchError("two_point_f: evaluations belong to different segments or bases");
    FBlock b;
    b.f = l.phi * r.psi - r.phi * l.psi;
    b.d_left = l.phi_deriv * r.psi - r.phi * l.psi_deriv;
    b.d_right = l.phi * r.psi_deriv - r.phi_deriv * l.psi;
    b.d_both = l.phi_deriv * r.psi_deriv - r.phi_deriv * l.psi_deriv;
    b.wronskian = l.wronskian();
    return b;
}

/// Sign-adjusted block used in the product form: the derivatives with respect to the
/// left point change sign, f and df/dx_r do not.
inline FBlock tilde_block(const FBlock& b) { return {b.f, -b.d_left, b.d_right, -b.d_both, b.wronskian}; }

namespace detail {

inline ImpedanceState finish_step(cplx n, cplx d, double log_scale, cplx w) {
    ImpedanceState out{n, d, log_scale};
    out.normalize();
    out.log_scale -= std::log(std::abs(w));
    return out;
}

}  // namespace detail

/// Carry the state from a segment's left end to its right end.
inline ImpedanceState step_forward(const ImpedanceState& in, const FBlock& b) {
    const cplx n = in.numerator, d = in.denominator;
    return detail::finish_step(b.d_both * d - b.d_right * n, b.d_left * d - b.f * n, in.log_scale, b.wronskian);
}

/// Carry the state from a segment's right end to its left end.
inline ImpedanceState step_backward(const ImpedanceState& in, const FBlock& b) {
    const cplx n = in.numerator, d = in.denominator;
    return detail::finish_step(b.d_both * d - b.d_left * n, b.d_right * d - b.f * n, in.log_scale, b.wronskian);
}

enum class Direction { forward, backward };

struct ChainOptions {
    /// Use the numeric pair on every segment (validation only).
    bool force_numeric = false;
    double numeric_tolerance = default_numeric_tolerance;
};

struct ChainResult {
    ImpedanceState state;
    bool fallback_basis_used = false;
};

namespace detail {

/// Constant segments wider than this many decay lengths are stepped in pieces so that
/// exp(gamma t) stays finite.
inline constexpr double max_constant_decay = 300.0;

struct SegmentBlock {
    FBlock block;
    bool fallback = false;
};

inline FBlock block_of(const Basis& b, double xl, double xr) { return two_point_f(b.at(xl), b.at(xr)); }

inline SegmentBlock segment_block(const Segment& seg, double E, const PhysicalConfig& cfg, const ChainOptions& opt) {
    if (!opt.force_numeric) {
        try {
            return {block_of(Basis::analytic(seg, E, cfg), seg.x_left, seg.x_right), false};
        } catch (const ConvergenceError&) {
        } catch (const OverflowError&) {
        } catch (const DomainError&) {
        }
    }
    return {block_of(Basis::numeric(seg, E, cfg, opt.numeric_tolerance), seg.x_left, seg.x_right), !opt.force_numeric};
}

/// Segments in the order they are stepped, thick constant barriers split into pieces.
inline std::vector<Segment> step_segments(const PotentialProfile& p, double E, const PhysicalConfig& cfg) {
    std::vector<Segment> out;
    out.reserve(p.segments.size());
    for (const auto& s : p.segments) {
        const auto* c = std::get_if<Constant>(&s.shape);
        int pieces = 1;
        if (c) {
            double decay = std::abs(wavevector(E, c->value, cfg).real()) * s.width();
            pieces = std::max(1, int(std::ceil(decay / max_constant_decay)));
        }
        if (pieces == 1) {
            out.push_back(s);
            continue;
        }
        for (int i = 0; i < pieces; ++i) {
            double a = i == 0 ? s.x_left : s.x_left + s.width() * i / pieces;
            double b = i + 1 == pieces ? s.x_right : s.x_left + s.width() * (i + 1) / pieces;
            out.emplace_back(a, b, s.shape);
        }
    }
    return out;
}

}  // namespace detail

/// Fold the load through every segment. Forward: load at the left end of the profile,
/// result at the right end. Backward: the reverse. Analytic bases that fail fall back
/// to the numeric pair and set fallback_basis_used.
inline ChainResult chain_impedance_detailed(const PotentialProfile& profile, double E, const ImpedanceState& load,
                                            Direction dir, const PhysicalConfig& cfg, const ChainOptions& opt = {}) {
    ChainResult r{load, false};
    const std::vector<Segment> segs = detail::step_segments(profile, E, cfg);
    const std::size_t n = segs.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Segment& s = segs[dir == Direction::forward ? k : n - 1 - k];
        detail::SegmentBlock sb = detail::segment_block(s, E, cfg, opt);
        r.fallback_basis_used = r.fallback_basis_used || sb.fallback;
        r.state = dir == Direction::forward ? step_forward(r.state, sb.block) : step_backward(r.state, sb.block);
    }
    return r;
}

inline ImpedanceState chain_impedance(const PotentialProfile& profile, double E, const ImpedanceState& load,
                                      Direction dir, const PhysicalConfig& cfg) {
    return chain_impedance_detailed(profile, E, load, dir, cfg).state;
}

/// Load given as an impedance in m/s.
inline ImpedanceState chain_impedance(const PotentialProfile& profile, double E, cplx z_load, Direction dir,
                                      const PhysicalConfig& cfg) {
    return chain_impedance(profile, E, ImpedanceState::from_impedance(z_load, cfg), dir, cfg);
}

/// The impedance at x_N written as a ratio of mixed partial derivatives of
/// F(x_0, ..., x_N) = prod_j ftilde_j(x_{j-1}, x_j), expanded literally by the product
/// rule. A block depends only on its own two points, so each differentiated interior
/// point is assigned to one of its two neighbouring blocks. Load at x_0, N <= 3.
///
///   numerator   = F^{(x_0 ... x_N)}     + lambda F^{(x_1 ... x_N)}
///   denominator = F^{(x_0 ... x_{N-1})} + lambda F^{(x_1 ... x_{N-1})}
inline ImpedanceState product_f_direct(const std::vector<FBlock>& blocks, const ImpedanceState& load) {
    const std::size_t n = blocks.size();
    if (n > 3) throw UnsupportedSizeError("product_f_direct supports at most 3 segments");
    if (n == 0) return load;
    std::vector<FBlock> t;
    for (const auto& b : blocks) t.push_back(tilde_block(b));

    // Mixed partial of F over the point set `mask` (bit j = x_j).
    auto partial = [&](unsigned mask) {
        // Interior points in the mask each pick the block on their left (bit set in
        // `choice`) or on their right.
        std::vector<unsigned> interior;
        for (unsigned j = 1; j < n; ++j)
            if (mask & (1u << j)) interior.push_back(j);
        cplx total = 0.0;
        for (unsigned choice = 0; choice < (1u << interior.size()); ++choice) {
            std::vector<int> want_left(n, 0), want_right(n, 0);  // per block
            if (mask & 1u) want_left[0] = 1;
            if (mask & (1u << n)) want_right[n - 1] = 1;
            for (std::size_t i = 0; i < interior.size(); ++i) {
                unsigned j = interior[i];
                if (choice & (1u << i)) want_right[j - 1] = 1;  // block j has x_j on its right
                else want_left[j] = 1;                          // block j+1 has x_j on its left
            }
            cplx prod = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                const FBlock& b = t[k];
                prod *= want_left[k] ? (want_right[k] ? b.d_both : b.d_left) : (want_right[k] ? b.d_right : b.f);
            }
            total += prod;
        }
        return total;
    };
    const unsigned all = (1u << (n + 1)) - 1;          // x_0 .. x_N
    const unsigned no_first = all & ~1u;               // x_1 .. x_N
    const unsigned no_last = all & ~(1u << n);         // x_0 .. x_{N-1}
    const unsigned inner = no_first & ~(1u << n);      // x_1 .. x_{N-1}
    const cplx ln = load.numerator, ld = load.denominator;
    ImpedanceState out{ld * partial(all) + ln * partial(no_first), ld * partial(no_last) + ln * partial(inner), 0.0};
    out.normalize();
    out.log_scale = 0.0;
    return out;
}

/// Product form evaluated on a profile's segments with their analytic bases.
inline ImpedanceState product_f_direct(const PotentialProfile& profile, double E, const ImpedanceState& load,
                                       const PhysicalConfig& cfg) {
    if (profile.segments.size() > 3) throw UnsupportedSizeError("product_f_direct supports at most 3 segments");
    std::vector<FBlock> blocks;
    for (const auto& s : profile.segments) blocks.push_back(detail::segment_block(s, E, cfg, {}).block);
    return product_f_direct(blocks, load);
}

inline ImpedanceState product_f_direct(const PotentialProfile& profile, double E, cplx z_load,
                                       const PhysicalConfig& cfg) {
    return product_f_direct(profile, E, ImpedanceState::from_impedance(z_load, cfg), cfg);
}

}  // namespace qwi

#endif
