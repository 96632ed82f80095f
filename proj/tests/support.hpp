#ifndef QWI_TESTS_SUPPORT_HPP
#define QWI_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace qwi::testing {

using cplx = std::complex<double>;

/// Deterministic generator shared by the randomized tests.
inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240607);
    return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline cplx uniform_complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }

inline double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Five-point central difference of f at x with step h.
template <class F>
auto diff5(F&& f, double x, double h) {
    return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

/// Five-point second difference.
template <class F>
auto diff5_second(F&& f, double x, double h) {
    return (-f(x - 2 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h * h);
}

}  // namespace qwi::testing

#endif
