#ifndef QWI_SPECFUN_FUNPAIR_HPP
#define QWI_SPECFUN_FUNPAIR_HPP

#include <complex>

namespace qwi::specfun {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Two solutions of the same second-order ODE and their first derivatives.
struct FunPair {
    cplx first;
    cplx first_deriv;
    cplx second;
    cplx second_deriv;

    cplx wronskian() const { return first * second_deriv - first_deriv * second; }
};

}  // namespace qwi::specfun

#endif
