#pragma once

#include <functional>

namespace ramsey {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod 15(7) on a finite interval. Splits the
// worst subinterval until the summed error estimate drops below
// max(abs_tol, rel_tol*|value|) or the interval budget runs out.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    double rel_tol = 1e-12,
                                    int max_intervals = 4000);

// Integral of f over [a, inf) for chunk integrals of alternating sign:
// sums chunks of width h and accelerates the alternating partial sums by
// iterated averaging. Intended for single-frequency oscillatory tails with
// a smooth decaying envelope (h = half period).
QuadratureResult sum_alternating_tail(const std::function<double(double)>& f,
                                      double a, double h, double abs_tol,
                                      int max_chunks = 512);

} // namespace ramsey
