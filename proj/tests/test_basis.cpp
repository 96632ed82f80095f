#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "qwi/basis.hpp"
#include "qwi/chain.hpp"
#include "qwi/specfun.hpp"
#include "support.hpp"

using namespace qwi;
using qwi::testing::diff5;
using qwi::testing::diff5_second;
using qwi::testing::rel_err;
using qwi::testing::uniform;

namespace {

const PhysicalConfig cfg{};

enum class Draw { constant, linear, exponential, parabolic };

struct Sample {
    Segment seg;
    double E;
};

Sample draw(Draw kind) {
    const double xl = uniform(-3.0, 3.0);
    const double xr = xl + uniform(0.5, 5.0);
    const double E = uniform(0.001, 0.8);
    switch (kind) {
        case Draw::constant: return {Segment(xl, xr, Constant{uniform(-0.3, 1.0)}), E};
        case Draw::linear: {
            double s = uniform(0.02, 0.2) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            return {Segment(xl, xr, Linear{uniform(0.0, 0.6), s}), E};
        }
        case Draw::exponential: {
            double A = uniform(0.05, 0.5) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            double rate = uniform(0.2, 1.0) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            return {Segment(xl, xr, Exponential{A, uniform(-1.0, 1.0), rate, uniform(-2.0, 2.0)}), E};
        }
        case Draw::parabolic: {
            double a = uniform(0.002, 0.05) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            return {Segment(xl, xr, Parabolic{a, uniform(xl - 1.0, xr + 1.0), uniform(0.0, 0.4)}), E};
        }
    }
    throw std::logic_error("unreachable");
}

/// |psi'' - q psi| with psi'' from a five-point second difference, relative to the local
/// envelope max(|psi''|, |q psi|, sqrt|q| |psi'|), which stays finite at nodes of psi.
double residual(const Basis& b, double x, bool second) {
    const double h = 2e-3;
    auto val = [&](double t) { return second ? b.at(t).phi : b.at(t).psi; };
    const BasisEval e = b.at(x);
    const cplx v = second ? e.phi : e.psi, dv = second ? e.phi_deriv : e.psi_deriv;
    const cplx d2 = diff5_second(val, x, h);
    const double q = (b.segment().potential(x) - b.energy()) / cfg.hbar2_over_2m();
    const double scale = std::max({std::abs(d2), std::abs(q * v), std::sqrt(std::abs(q)) * std::abs(dv)});
    return std::abs(d2 - q * v) / scale;
}

}  // namespace

namespace {

class ShapeTest : public ::testing::TestWithParam<Draw> {};

std::string draw_name(const ::testing::TestParamInfo<Draw>& i) {
    switch (i.param) {
        case Draw::constant: return "constant";
        case Draw::linear: return "linear";
        case Draw::exponential: return "exponential";
        case Draw::parabolic: return "parabolic";
    }
    return "unknown";
}

}  // namespace

TEST_P(ShapeTest, SchrodingerResidual) {
    int used = 0;
    for (int i = 0; i < 100; ++i) {
        Sample s = draw(GetParam());
        Basis b = Basis::numeric(s.seg, s.E, cfg);
        try {
            b = Basis::analytic(s.seg, s.E, cfg);
        } catch (const ConvergenceError&) {
            continue;  // the chain falls back to the numeric pair here
        } catch (const OverflowError&) {
            continue;
        }
        ++used;
        const double x = uniform(s.seg.x_left + 0.01, s.seg.x_right - 0.01);
        EXPECT_LT(residual(b, x, false), 1e-6) << basis_kind_name(b.kind()) << " x = " << x << " E = " << s.E;
        EXPECT_LT(residual(b, x, true), 1e-6) << basis_kind_name(b.kind()) << " x = " << x << " E = " << s.E;
    }
    EXPECT_GE(used, 80);
}

TEST_P(ShapeTest, DerivativeChannelsMatchValues) {
    for (int i = 0; i < 50; ++i) {
        Sample s = draw(GetParam());
        try {
            Basis b = Basis::analytic(s.seg, s.E, cfg);
            const double x = uniform(s.seg.x_left + 0.01, s.seg.x_right - 0.01);
            const BasisEval e = b.at(x);
            const cplx dpsi = diff5([&](double t) { return b.at(t).psi; }, x, 2e-3);
            const cplx dphi = diff5([&](double t) { return b.at(t).phi; }, x, 2e-3);
            EXPECT_LT(std::abs(dpsi - e.psi_deriv), 1e-6 * std::max(std::abs(e.psi_deriv), std::abs(e.psi)));
            EXPECT_LT(std::abs(dphi - e.phi_deriv), 1e-6 * std::max(std::abs(e.phi_deriv), std::abs(e.phi)));
        } catch (const ConvergenceError&) {
        } catch (const OverflowError&) {
        }
    }
}

TEST_P(ShapeTest, WronskianConstantAlongSegment) {
    for (int i = 0; i < 100; ++i) {
        Sample s = draw(GetParam());
        try {
            Basis b = Basis::analytic(s.seg, s.E, cfg);
            const cplx w = b.wronskian();
            ASSERT_NE(w, cplx(0.0));
            for (int k = 0; k <= 10; ++k) {
                const double x = s.seg.x_left + s.seg.width() * k / 10.0;
                EXPECT_LT(rel_err(b.at(x).wronskian(), w), 1e-9) << basis_kind_name(b.kind()) << " x = " << x;
            }
        } catch (const ConvergenceError&) {
        } catch (const OverflowError&) {
        }
    }
}

TEST_P(ShapeTest, NumericFallbackClosure) {
    ChainOptions numeric;
    numeric.force_numeric = true;
    for (int i = 0; i < 30; ++i) {
        Sample s = draw(GetParam());
        PotentialProfile p{0.0, 0.0, {s.seg}};
        const cplx load = lead_impedance(s.E, 0.0, cfg);
        ChainResult a = chain_impedance_detailed(p, s.E, ImpedanceState::from_impedance(load, cfg),
                                                 Direction::backward, cfg);
        ChainResult n = chain_impedance_detailed(p, s.E, ImpedanceState::from_impedance(load, cfg),
                                                 Direction::backward, cfg, numeric);
        EXPECT_LT(rel_err(a.state.impedance(cfg), n.state.impedance(cfg)), 1e-6) << s.E;
    }
}

INSTANTIATE_TEST_SUITE_P(Shapes, ShapeTest,
                         ::testing::Values(Draw::constant, Draw::linear, Draw::exponential, Draw::parabolic),
                         draw_name);

// ---------------------------------------------------------------------------
// Constant

TEST(BasisConstant, ThresholdUsesLinearPair) {
    Segment seg(0.0, 2.0, Constant{0.3});
    const BasisEval e = basis_constant(seg, 0.3, 1.5, cfg);
    EXPECT_EQ(e.psi, cplx(1.0));
    EXPECT_EQ(e.psi_deriv, cplx(0.0));
    EXPECT_EQ(e.phi, cplx(1.5));
    EXPECT_EQ(e.phi_deriv, cplx(1.0));
}

TEST(BasisConstant, GrowingAndDecayingUnderBarrier) {
    Segment seg(0.0, 2.0, Constant{0.5});
    const BasisEval a = basis_constant(seg, 0.1, 0.5, cfg), b = basis_constant(seg, 0.1, 1.5, cfg);
    EXPECT_EQ(a.psi.imag(), 0.0);
    EXPECT_EQ(a.phi.imag(), 0.0);
    EXPECT_GT(b.psi.real(), a.psi.real());
    EXPECT_LT(b.phi.real(), a.phi.real());
}

TEST(BasisConstant, WronskianIsMinusTwoGamma) {
    Segment seg(-1.0, 3.0, Constant{0.2});
    for (double E : {0.05, 0.4, 1.0}) {
        const cplx g = wavevector(E, 0.2, cfg);
        for (double x : {-1.0, 0.0, 1.7, 3.0})
            EXPECT_LT(rel_err(basis_constant(seg, E, x, cfg).wronskian(), -2.0 * g), 1e-14) << E << " " << x;
    }
}

TEST(BasisConstant, OutsideSegmentIsDomainError) {
    Segment seg(0.0, 1.0, Constant{0.2});
    EXPECT_THROW(basis_constant(seg, 0.1, 1.5, cfg), DomainError);
    EXPECT_THROW(basis_linear(seg, 0.1, 0.5, cfg), DomainError);
}

// ---------------------------------------------------------------------------
// Exponential

TEST(BasisExponential, ResidualAtFiftyPoints) {
    Segment seg(0.0, 3.0, Exponential{0.3, -0.5, 0.8, -1.0});
    Basis b = Basis::analytic(seg, 0.2, cfg);
    for (int k = 1; k < 50; ++k) {
        const double x = 0.02 + 2.96 * k / 50.0;
        EXPECT_LT(residual(b, x, false), 1e-8) << x;
        EXPECT_LT(residual(b, x, true), 1e-8) << x;
    }
}

TEST(BasisExponential, VanishingAmplitudeMatchesConstant) {
    Segment e(0.0, 2.0, Exponential{1e-12, 0.5, 0.7, 0.0});
    Segment c(0.0, 2.0, Constant{0.0});
    for (double E : {0.05, 0.3}) {
        Basis b = Basis::analytic(e, E, cfg);
        EXPECT_NE(b.wronskian(), cplx(0.0));
        EXPECT_GT(std::abs(b.at(1.0).wronskian()), 0.0);
        const cplx load = lead_impedance(E, 0.0, cfg);
        ImpedanceState ze = chain_impedance(PotentialProfile{0.0, 0.0, {e}}, E, load, Direction::backward, cfg);
        ImpedanceState zc = chain_impedance(PotentialProfile{0.0, 0.0, {c}}, E, load, Direction::backward, cfg);
        EXPECT_LT(projective_distance(ze, zc), 1e-9) << E;
    }
}

TEST(BasisExponential, ZeroOrderAtE_equals_AB) {
    const Exponential shape{0.4, 0.5, 0.6, 0.0};
    Segment seg(0.0, 2.0, shape);
    const double E = shape.amplitude * shape.offset_b;
    Basis b = Basis::analytic(seg, E, cfg);
    EXPECT_LT(residual(b, 1.0, false), 1e-8);
    EXPECT_LT(residual(b, 1.0, true), 1e-8);
    EXPECT_LT(rel_err(b.at(0.3).wronskian(), b.wronskian()), 1e-9);
}

// ---------------------------------------------------------------------------
// Parabolic

TEST(BasisParabolic, ResidualAtFiftyPoints) {
    for (double a : {0.02, -0.02}) {
        Segment seg(-3.0, 3.0, Parabolic{a, 0.0, 0.1});
        Basis b = Basis::analytic(seg, 0.25, cfg);
        for (int k = 1; k < 50; ++k) {
            const double x = -2.95 + 5.9 * k / 50.0;
            EXPECT_LT(residual(b, x, false), 1e-8) << a << " " << x;
            EXPECT_LT(residual(b, x, true), 1e-8) << a << " " << x;
        }
    }
}

TEST(BasisParabolic, ParityAndRegularityAtCenter) {
    for (double a : {0.03, -0.03}) {
        const double c = 1.5;
        Segment seg(c - 4.0, c + 4.0, Parabolic{a, c, 0.05});
        Basis b = Basis::analytic(seg, 0.2, cfg);
        const BasisEval at0 = b.at(c);
        EXPECT_TRUE(std::isfinite(std::abs(at0.psi)));
        EXPECT_EQ(at0.psi, cplx(1.0));
        EXPECT_EQ(at0.psi_deriv, cplx(0.0));
        EXPECT_EQ(at0.phi, cplx(0.0));
        EXPECT_EQ(at0.phi_deriv, cplx(1.0));
        for (double y : {0.4, 1.3, 3.7}) {
            const BasisEval p = b.at(c + y), m = b.at(c - y);
            EXPECT_LT(rel_err(m.psi, p.psi), 1e-12) << y;
            EXPECT_LT(rel_err(m.phi, -p.phi), 1e-12) << y;
            EXPECT_LT(rel_err(m.psi_deriv, -p.psi_deriv), 1e-12) << y;
            EXPECT_LT(rel_err(m.phi_deriv, p.phi_deriv), 1e-12) << y;
        }
    }
}

TEST(BasisParabolic, WhittakerPairGivesSameImpedance) {
    // On a subdomain that excludes the center both pairs span the same solutions.
    for (double a : {0.02, -0.02}) {
        Segment seg(0.5, 4.0, Parabolic{a, 0.0, 0.1});
        for (double E : {0.05, 0.15, 0.4}) {
            Basis w = Basis::whittaker(seg, E, cfg);
            EXPECT_LT(residual(w, 2.0, false), 1e-8);
            EXPECT_LT(residual(w, 2.0, true), 1e-8);
            const cplx w0 = w.at(seg.x_left).wronskian();
            EXPECT_LT(rel_err(w.at(seg.x_right).wronskian(), w0), 1e-9);
            FBlock bw = detail::block_of(w, seg.x_left, seg.x_right);
            FBlock be = detail::block_of(Basis::analytic(seg, E, cfg), seg.x_left, seg.x_right);
            bw.wronskian = w0;
            const ImpedanceState load = ImpedanceState::from_impedance(lead_impedance(E, 0.0, cfg), cfg);
            EXPECT_LT(projective_distance(step_backward(load, bw), step_backward(load, be)), 1e-9) << a << " " << E;
        }
    }
}

TEST(BasisParabolic, WhittakerNeedsOneSide) {
    Segment seg(-1.0, 1.0, Parabolic{0.02, 0.0, 0.0});
    EXPECT_THROW(Basis::whittaker(seg, 0.1, cfg), DomainError);
}

// ---------------------------------------------------------------------------
// Linear

TEST(BasisLinear, ResidualAtFiftyPoints) {
    for (double slope : {0.1, -0.1}) {
        Segment seg(0.0, 4.0, Linear{0.2, slope});
        Basis b = Basis::analytic(seg, 0.15, cfg);
        for (int k = 1; k < 50; ++k) {
            const double x = 0.02 + 3.96 * k / 50.0;
            EXPECT_LT(residual(b, x, false), 1e-8) << slope << " " << x;
            EXPECT_LT(residual(b, x, true), 1e-8) << slope << " " << x;
        }
    }
}

TEST(BasisLinear, TinySlopeMatchesConstant) {
    Segment lin(0.0, 3.0, Linear{0.2, 1e-10});
    Segment con(0.0, 3.0, Constant{0.2});
    for (double E : {0.1, 0.35}) {
        const cplx load = lead_impedance(E, 0.0, cfg);
        ImpedanceState a = chain_impedance(PotentialProfile{0.0, 0.0, {lin}}, E, load, Direction::backward, cfg);
        ImpedanceState b = chain_impedance(PotentialProfile{0.0, 0.0, {con}}, E, load, Direction::backward, cfg);
        EXPECT_LT(rel_err(a.impedance(cfg), b.impedance(cfg)), 1e-6) << E;
    }
}

TEST(BasisLinear, TurningPointMapsToZero) {
    Segment seg(0.0, 4.0, Linear{0.1, 0.05});
    const double E = 0.2, xstar = 2.0;  // U(2) = 0.2
    Basis b = Basis::analytic(seg, E, cfg);
    const specfun::FunPair a0 = specfun::airy(0.0);
    EXPECT_LT(rel_err(b.at(xstar).psi, a0.first), 1e-14);
    EXPECT_LT(rel_err(b.at(xstar).phi, a0.second), 1e-14);
    for (double dx : {-0.3, -0.01, 0.01, 0.3}) {
        EXPECT_LT(residual(b, xstar + dx, false), 1e-6) << dx;
        EXPECT_LT(residual(b, xstar + dx, true), 1e-6) << dx;
    }
}

// ---------------------------------------------------------------------------
// Numeric

TEST(BasisNumeric, InitialConditionsAtLeftEdge) {
    Segment seg(1.0, 3.0, Exponential{0.3, 0.0, 0.5, 0.0});
    const BasisEval e = basis_numeric(seg, 0.2, 1.0, cfg);
    EXPECT_EQ(e.psi, cplx(1.0));
    EXPECT_EQ(e.psi_deriv, cplx(0.0));
    EXPECT_EQ(e.phi, cplx(0.0));
    EXPECT_EQ(e.phi_deriv, cplx(1.0));
}

TEST(BasisNumeric, WronskianConstant) {
    Segment seg(0.0, 5.0, Numeric::from_callable([](double x) { return 0.3 * std::sin(x) * std::sin(x); }));
    Basis b = Basis::numeric(seg, 0.15, cfg);
    for (int k = 0; k <= 10; ++k) EXPECT_LT(rel_err(b.at(0.5 * k).wronskian(), 1.0), 1e-9) << k;
}

TEST(BasisNumeric, MatchesConstantAfterChangeOfBasis) {
    Segment seg(0.0, 2.5, Constant{0.3});
    for (double E : {0.1, 0.3 + 1e-9, 0.7}) {
        Basis c = Basis::analytic(seg, E, cfg);
        Basis n = Basis::numeric(seg, E, cfg);
        // Coefficients of the numeric pair in the analytic one, from the data at x = 0.
        const BasisEval c0 = c.at(0.0);
        const cplx w = c0.wronskian();
        const cplx a1 = c0.phi_deriv / w, b1 = -c0.psi_deriv / w;  // (1, 0)
        const cplx a2 = -c0.phi / w, b2 = c0.psi / w;              // (0, 1)
        for (double x : {0.7, 1.9, 2.5}) {
            const BasisEval ce = c.at(x), ne = n.at(x);
            EXPECT_LT(rel_err(ne.psi, a1 * ce.psi + b1 * ce.phi), 1e-8) << E << " " << x;
            EXPECT_LT(rel_err(ne.psi_deriv, a1 * ce.psi_deriv + b1 * ce.phi_deriv), 1e-8) << E << " " << x;
            EXPECT_LT(rel_err(ne.phi, a2 * ce.psi + b2 * ce.phi), 1e-8) << E << " " << x;
            EXPECT_LT(rel_err(ne.phi_deriv, a2 * ce.psi_deriv + b2 * ce.phi_deriv), 1e-8) << E << " " << x;
        }
    }
}

TEST(BasisCondition, MismatchedWronskianIsInfinite) {
    BasisEval e{1.0, 0.0, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(basis_condition(e, 1.0), 1.0);
    EXPECT_TRUE(std::isinf(basis_condition(e, 2.0)));
    BasisEval nan{std::nan(""), 0.0, 0.0, 1.0};
    EXPECT_TRUE(std::isinf(basis_condition(nan, 1.0)));
}

TEST(BasisCondition, IllConditionedExponentialFallsBack) {
    // A long, slowly varying exponential tail where the Bessel pair underflows.
    PotentialProfile p{0.0, 0.0, {Segment(0.0, 10.0, Exponential{1.0, 1.0, -0.05, 0.0})}};
    int fallbacks = 0;
    for (double E : {0.05, 0.4, 0.9, 1.4}) {
        const cplx load = lead_impedance(E, 0.0, cfg);
        ChainResult r =
            chain_impedance_detailed(p, E, ImpedanceState::from_impedance(load, cfg), Direction::backward, cfg);
        EXPECT_TRUE(r.state.valid());
        EXPECT_TRUE(std::isfinite(std::abs(r.state.impedance(cfg))));
        fallbacks += r.fallback_basis_used;
    }
    EXPECT_GT(fallbacks, 0);
}
