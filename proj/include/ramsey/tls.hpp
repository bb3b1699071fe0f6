#ifndef RAMSEY_TLS_HPP
#define RAMSEY_TLS_HPP

#include <cstddef>
#include <vector>

namespace ramsey {

// One dispersively coupled two-level fluctuator: frequency shift +-V depending
// on its state, switching rates W01 (|0> -> |1>) and W10 (|1> -> |0>).
struct TlsParams {
    double V = 0.0;
    double W01 = 0.0;
    double W10 = 0.0;

    double W() const { return W01 + W10; }
    double dW() const { return W10 - W01; }
    // visibility factor w = 2 sqrt(W01 W10) / W; 1 for a frozen (W=0) TLS,
    // which is only reachable in the symmetric case
    double w_factor() const;
    // <tau_z> = dW/W, 0 for frozen
    double mean_tau_z() const;

    void validate() const;
};

struct TlsStationary {
    double w0; // occupation of |0>
    double w1; // occupation of |1>
    double mean_tau_z;
};

// Stationary populations from the balance equation. Rejects W = 0.
TlsStationary tls_stationary(const TlsParams& tls);

struct TlsEnsemble {
    std::vector<TlsParams> tls;

    std::size_t size() const { return tls.size(); }
    void validate() const;
};

// Mean qubit frequency shift sum_n V^(n) <tau_z^(n)>.
double mean_frequency_shift(const TlsEnsemble& ensemble);

// Ladder of symmetric TLSs with W^(n) t_R = exp(-alpha (n + n0)), n = 1..n_tls.
// A log-uniform rate ladder like this mimics a log-normal rate distribution and
// produces a 1/f-like spectrum over ~ alpha * n_tls / ln(10) decades.
TlsEnsemble symmetric_ladder(int n_tls, double V, double alpha, double n0,
                             double t_R = 1.0);

} // namespace ramsey

#endif
