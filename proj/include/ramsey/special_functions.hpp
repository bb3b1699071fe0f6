#pragma once

namespace ramsey {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

// Principal-value exponential integral Ei(x), x != 0.
double expint_ei(double x);

// Hyperbolic sine integral shi(x) (odd, entire).
double sinh_integral(double x);

// Hyperbolic cosine integral chi(x), defined for x > 0.
double cosh_integral(double x);

namespace detail {
// Extended-precision variants used where large cancelling combinations of
// Ei values must be formed before the final subtraction.
long double expint_ei_ld(long double x);
long double sinh_integral_ld(long double x);
long double cosh_integral_ld(long double x);
} // namespace detail

} // namespace ramsey
