#ifndef QWI_SPECFUN_GAMMA_HPP
#define QWI_SPECFUN_GAMMA_HPP

// Complex gamma via the Lanczos approximation (g = 7, 9 terms) with reflection.

#include <array>
#include <cmath>
#include <complex>

namespace qwi::specfun {

using cplx = std::complex<double>;

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_p = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline constexpr double half_log_two_pi = 0.91893853320467274178;
inline constexpr double pi = 3.141592653589793238462643383279502884;

// log Gamma(z) for Re z >= 0.5.
inline cplx lgamma_right(cplx z) {
    z -= 1.0;
    cplx x = lanczos_p[0];
    for (std::size_t i = 1; i < lanczos_p.size(); ++i) x += lanczos_p[i] / (z + double(i));
    cplx t = z + lanczos_g + 0.5;
    return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

/// log Gamma(z) on some branch (imaginary part not reduced). Re z >= 0.5 only
/// gives the principal branch; callers that exponentiate do not care.
inline cplx lgamma(cplx z) {
    if (z.real() >= 0.5) return detail::lgamma_right(z);
    return std::log(detail::pi / std::sin(detail::pi * z)) - detail::lgamma_right(1.0 - z);
}

inline cplx gamma(cplx z) {
    if (z.real() >= 0.5) return std::exp(detail::lgamma_right(z));
    return detail::pi / (std::sin(detail::pi * z) * std::exp(detail::lgamma_right(1.0 - z)));
}

/// 1/Gamma(z); entire, and exactly representable as ~0 near the poles.
inline cplx rgamma(cplx z) {
    if (z.real() >= 0.5) return std::exp(-detail::lgamma_right(z));
    return std::sin(detail::pi * z) * std::exp(detail::lgamma_right(1.0 - z)) / detail::pi;
}

}  // namespace qwi::specfun

#endif
