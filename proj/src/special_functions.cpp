#include "ramsey/special_functions.hpp"

#include <cmath>
#include <limits>

#include "ramsey/errors.hpp"

namespace ramsey {

namespace {

template <typename F>
constexpr F euler_gamma_v =
    F(0.57721566490153286060651209008240243L);

// power series around 0: Ei(x) = gamma + ln|x| + sum x^n/(n n!)
template <typename F>
F ei_series(F x) {
    F sum = 0, term = 1;
    const F eps = std::numeric_limits<F>::epsilon();
    for (int n = 1; n < 400; ++n) {
        term *= x / F(n);
        const F add = term / F(n);
        sum += add;
        if (std::abs(add) < eps * (std::abs(sum) + F(1))) break;
    }
    return euler_gamma_v<F> + std::log(std::abs(x)) + sum;
}

// E1(y) for y > 1 by the modified-Lentz continued fraction
template <typename F>
F e1_continued_fraction(F y) {
    const F tiny = std::numeric_limits<F>::min() * F(1e4);
    const F eps = std::numeric_limits<F>::epsilon();
    F b = y + 1;
    F c = F(1) / tiny;
    F d = F(1) / b;
    F h = d;
    for (int n = 1; n < 200; ++n) {
        const F a = -F(n) * F(n);
        b += 2;
        d = F(1) / (a * d + b);
        c = b + a / c;
        const F del = c * d;
        h *= del;
        if (std::abs(del - F(1)) < eps) break;
    }
    return h * std::exp(-y);
}

// divergent asymptotic series for Ei(x), large positive x, truncated at the
// smallest term
template <typename F>
F ei_asymptotic(F x) {
    F sum = 1, term = 1;
    for (int n = 1; n < 200; ++n) {
        const F next = term * F(n) / x;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
    }
    return std::exp(x) / x * sum;
}

template <typename F>
F ei_impl(F x) {
    if (x == 0) return -std::numeric_limits<F>::infinity();
    if (x < 0) {
        const F y = -x;
        if (y <= F(8)) return ei_series(x);
        return -e1_continued_fraction(y);
    }
    if (x <= F(40)) return ei_series(x);
    return ei_asymptotic(x);
}

template <typename F>
F shi_impl(F x) {
    if (std::abs(x) <= F(16)) {
        F sum = 0, term = x;
        const F eps = std::numeric_limits<F>::epsilon();
        for (int n = 0; n < 200; ++n) {
            const int m = 2 * n + 1;
            sum += term / F(m);
            const F add = std::abs(term / F(m));
            term *= x * x / (F(m + 1) * F(m + 2));
            if (add < eps * (std::abs(sum) + F(1)) && n > 1) break;
        }
        return sum;
    }
    const F a = std::abs(x);
    const F v = (ei_impl(a) - ei_impl(-a)) / 2;
    return x > 0 ? v : -v;
}

template <typename F>
F chi_impl(F x) {
    if (x <= 0) throw config_error("cosh_integral: requires x > 0");
    if (x <= F(16)) {
        F sum = 0, term = x * x / 2;
        const F eps = std::numeric_limits<F>::epsilon();
        for (int n = 1; n < 200; ++n) {
            const int m = 2 * n;
            sum += term / F(m);
            const F add = term / F(m);
            term *= x * x / (F(m + 1) * F(m + 2));
            if (add < eps * (std::abs(sum) + F(1)) && n > 1) break;
        }
        return euler_gamma_v<F> + std::log(x) + sum;
    }
    return (ei_impl(x) + ei_impl(-x)) / 2;
}

} // namespace

double expint_ei(double x) { return ei_impl<double>(x); }
double sinh_integral(double x) { return shi_impl<double>(x); }
double cosh_integral(double x) { return chi_impl<double>(x); }

namespace detail {
long double expint_ei_ld(long double x) { return ei_impl<long double>(x); }
long double sinh_integral_ld(long double x) { return shi_impl<long double>(x); }
long double cosh_integral_ld(long double x) { return chi_impl<long double>(x); }
} // namespace detail

} // namespace ramsey
