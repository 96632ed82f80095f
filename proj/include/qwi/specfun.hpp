#ifndef QWI_SPECFUN_HPP
#define QWI_SPECFUN_HPP

// Special-function kernel: complex gamma, Airy, Bessel (J, Y, I), Kummer and
// Whittaker functions, each with its first derivative.

#include "qwi/specfun/airy.hpp"
#include "qwi/specfun/bessel.hpp"
#include "qwi/specfun/funpair.hpp"
#include "qwi/specfun/gamma.hpp"
#include "qwi/specfun/kummer.hpp"
#include "qwi/specfun/taylor.hpp"
#include "qwi/specfun/tolerances.hpp"

#endif
