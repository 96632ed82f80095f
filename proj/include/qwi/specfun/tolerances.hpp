#ifndef QWI_SPECFUN_TOLERANCES_HPP
#define QWI_SPECFUN_TOLERANCES_HPP

namespace qwi::specfun {

/// Every accuracy knob of the special-function kernel lives here.
struct Tolerances {
    /// Stop summing a series once a term falls below this fraction of the sum.
    static constexpr double series_term = 1e-17;
    /// Largest acceptable sum(|terms|)/|sum| before a series is declared unreliable.
    /// eps * 1e5 ~ 2e-11 relative.
    static constexpr double max_cancellation = 1e5;
    static constexpr int max_series_terms = 5000;
    /// Last-resort limit when no other method applies (~1e-8 relative).
    static constexpr double relaxed_cancellation = 1e8;

    /// Asymptotic expansions must reach this relative term size before diverging.
    /// Imaginary Bessel orders near |nu| = 4 bottom out around 1e-14 at |z| = 20.
    static constexpr double asymptotic_term = 1e-13;

    /// Orders (Bessel) or parameters b (Kummer U) closer than this to an integer are
    /// evaluated by Richardson extrapolation from samples at n +- e, n +- 2e with
    /// e = limit_offset; truncation error O(e^4), rounding ~ eps / e.
    static constexpr double integer_window = 1e-6;
    static constexpr double limit_offset = 1e-3;

    /// Airy: Maclaurin series inside this radius, asymptotics outside the outer radius,
    /// Taylor stepping along rays in between.
    static constexpr double airy_series_radius = 2.0;
    static constexpr double airy_asymptotic_radius = 9.0;
    static constexpr double airy_step = 0.6;
    /// |Re zeta| above this would overflow exp().
    static constexpr double exp_guard = 700.0;

    /// Bessel J/Y: ascending series up to the inner radius, Hankel expansion beyond the
    /// outer one; in between the series if its cancellation is acceptable, otherwise
    /// Taylor stepping inward from the outer radius.
    static constexpr double bessel_series_radius = 10.0;
    static constexpr double bessel_hankel_radius = 20.0;
    static constexpr double bessel_step = 1.0;

    /// Kummer M: ascending series inside this radius, Taylor stepping beyond.
    static constexpr double kummer_series_radius = 4.0;
    /// Kummer U: asymptotic series from this |z| outward; Taylor stepping inward to the
    /// connection-formula region in the right half plane.
    static constexpr double kummer_asymptotic_radius = 40.0;
    static constexpr double kummer_max_step = 1.0;
};

}  // namespace qwi::specfun

#endif
