#include <gtest/gtest.h>

#include <cmath>

#include "qwi/oracle.hpp"
#include "qwi/scattering.hpp"
#include "support.hpp"

using namespace qwi;
using qwi::testing::rel_err;
using qwi::testing::uniform;

namespace {

const PhysicalConfig cfg{};

double rectangular_T(double E, double Ub, double L) {
    const double h2m = cfg.hbar2_over_2m();
    const double k = std::sqrt(std::abs(Ub - E) / h2m);
    const double s = E < Ub ? std::sinh(k * L) : std::sin(k * L);
    return 1.0 / (1.0 + Ub * Ub * s * s / (4.0 * E * std::abs(Ub - E)));
}

}  // namespace

TEST(Riccati, MatchedLoadIsFixedPoint) {
    for (double E : {0.1, 0.7}) {
        PotentialProfile p{0.0, 0.3, {Segment(0.0, 4.0, Constant{0.3})}};
        const cplx z = lead_impedance(E, 0.3, cfg);
        const RiccatiResult r = riccati_integrate(p, E, z, 1e-12, cfg);
        EXPECT_LT(rel_err(r.state.impedance(cfg), z), 1e-10) << E;
        EXPECT_LT(r.error_estimate, 1e-9);
    }
}

TEST(Riccati, CrossesWavefunctionNodes) {
    // A real load in a propagating region makes psi vanish repeatedly.
    PotentialProfile p{0.0, 0.0, {Segment(0.0, 30.0, Constant{0.0})}};
    const double E = 0.4, k = std::sqrt(E / cfg.hbar2_over_2m());
    const RiccatiResult r = riccati_integrate(p, E, ImpedanceState::from_log_derivative(0.0), 1e-12, cfg);
    // psi = cos(k (x - 30)), so psi'/psi at 0 is k tan(30 k).
    EXPECT_LT(rel_err(r.state.log_derivative(), cplx(k * std::tan(30.0 * k))), 1e-8);
}

TEST(Riccati, RectangularClosedForm) {
    PotentialProfile p = rectangular_barrier(0.5, 2.0);
    for (int i = 1; i < 40; ++i) {
        const double E = 0.02 * i;
        if (std::abs(E - 0.5) < 1e-9) continue;
        EXPECT_LT(rel_err(riccati_transmission(p, E, cfg, 1e-12).T, rectangular_T(E, 0.5, 2.0)), 1e-8) << E;
    }
}

TEST(Riccati, FluxFormKeepsTinyTransmission) {
    PotentialProfile p = rectangular_barrier(1.0, 20.0);
    for (double E : {0.05, 0.3}) {
        const OracleTransmission o = riccati_transmission(p, E, cfg, 1e-12);
        EXPECT_LT(rel_err(o.T, rectangular_T(E, 1.0, 20.0)), 1e-7) << E;
        EXPECT_NEAR(o.R, 1.0, 1e-12);
    }
}

TEST(Riccati, AgreesWithChainOnDeformedBarrier) {
    PotentialProfile p = deformed_double_barrier().profile;
    const double top = profile_maximum(p);
    for (int i = 0; i < 20; ++i) {
        const double E = uniform(0.41, 1.5 * top);
        const OracleTransmission o = riccati_transmission(p, E, cfg, 1e-12);
        EXPECT_LT(rel_err(transmission(p, E, cfg).T, o.T), 1e-6) << E;
        EXPECT_NEAR(o.T + o.R, 1.0, 1e-9);
    }
}

TEST(Riccati, EvanescentLeadGivesZero) {
    PotentialProfile p = asymmetric_three_segment();
    const OracleTransmission o = riccati_transmission(p, 0.05, cfg);
    EXPECT_EQ(o.T, 0.0);
    EXPECT_EQ(o.R, 1.0);
}

TEST(Riccati, RejectsNonPositiveTolerance) {
    EXPECT_THROW(riccati_integrate(rectangular_barrier(), 0.2, cplx(1.0), 0.0, cfg), DomainError);
}

TEST(TransferMatrix, RectangularClosedForm) {
    PotentialProfile p = rectangular_barrier(0.5, 2.0);
    for (int i = 1; i < 100; ++i) {
        const double E = 0.01 * i;
        if (std::abs(E - 0.5) < 1e-9) continue;
        const OracleTransmission o = transfer_matrix_transmission(p, E, cfg);
        EXPECT_LT(rel_err(o.T, rectangular_T(E, 0.5, 2.0)), 1e-12) << E;
        EXPECT_NEAR(o.T + o.R, 1.0, 1e-12);
    }
}

TEST(TransferMatrix, AgreesWithChainOnConstantProfiles) {
    const PotentialProfile stepped{0.0, 0.1, {Segment(0.0, 1.0, Constant{0.4}), Segment(1.0, 3.0, Constant{-0.2}),
                                              Segment(3.0, 3.5, Constant{0.6})}};
    for (const PotentialProfile& p : {rectangular_double_barrier(), stepped}) {
        for (int i = 0; i < 100; ++i) {
            const double E = uniform(0.101, 1.0);
            EXPECT_LT(rel_err(transfer_matrix_transmission(p, E, cfg).T, transmission(p, E, cfg).T), 1e-10) << E;
        }
    }
}

TEST(TransferMatrix, RejectsNonConstantSegments) {
    EXPECT_THROW(transfer_matrix_transmission(deformed_double_barrier().profile, 0.3, cfg), DomainError);
}

TEST(Staircase, ConstantSourceIsUnchanged) {
    PotentialProfile p = rectangular_double_barrier();
    const StaircaseProfile s = staircase(p, 50);
    ASSERT_EQ(s.profile.segments.size(), p.segments.size());
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
        EXPECT_EQ(s.profile.segments[k].x_left, p.segments[k].x_left);
        EXPECT_EQ(s.profile.segments[k].x_right, p.segments[k].x_right);
        EXPECT_EQ(s.profile.segments[k].potential(0.0), p.segments[k].potential(0.0));
    }
}

TEST(Staircase, SingleStepTakesMidpointValue) {
    PotentialProfile p{0.0, 0.0, {Segment(1.0, 3.0, Linear{0.1, 0.05})}};
    const StaircaseProfile s = staircase(p, 1);
    ASSERT_EQ(s.profile.segments.size(), 1u);
    EXPECT_NEAR(s.profile.segments[0].potential(2.0), 0.15, 1e-15);
    EXPECT_EQ(s.profile.segments[0].x_left, 1.0);
    EXPECT_EQ(s.profile.segments[0].x_right, 3.0);
    EXPECT_THROW(staircase(p, 0), DomainError);
}

TEST(Staircase, StepsTileEachSegment) {
    PotentialProfile p = deformed_double_barrier().profile;
    const StaircaseProfile s = staircase(p, 17);
    EXPECT_EQ(s.profile.segments.size(), 3u * 17u);
    EXPECT_TRUE(s.profile.violations().empty());
    EXPECT_EQ(s.profile.segments.front().x_left, p.segments.front().x_left);
    EXPECT_EQ(s.profile.segments.back().x_right, p.segments.back().x_right);
}

TEST(Staircase, ConvergesMonotonicallyToChain) {
    PotentialProfile p = deformed_double_barrier().profile;
    for (double E : {0.45, 0.6, 0.9}) {
        const double exact = transmission(p, E, cfg).T;
        double prev = 1e300;
        for (int n : {10, 20, 40, 80, 160, 320}) {
            const double err = rel_err(transfer_matrix_transmission(staircase(p, n).profile, E, cfg).T, exact);
            EXPECT_LT(err, prev) << "E = " << E << " n = " << n;
            prev = err;
        }
        EXPECT_LT(prev, 1e-3) << E;
    }
}
