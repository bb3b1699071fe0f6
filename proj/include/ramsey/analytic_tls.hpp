#ifndef RAMSEY_ANALYTIC_TLS_HPP
#define RAMSEY_ANALYTIC_TLS_HPP

#include <array>
#include <complex>

#include "ramsey/protocol.hpp"
#include "ramsey/tls.hpp"

namespace ramsey {

using cplx = std::complex<double>;

// gamma = 1/2 sqrt(W^2 + 4iV(dW + iV)), principal branch. All downstream
// quantities are even in gamma, so the branch choice is immaterial.
cplx gamma_param(const TlsParams& tls);

// Single-measurement dephasing factor of one TLS,
// Xi = [(W/2 + iV dW/W) sinh(g t_R)/g + cosh(g t_R)] e^{-W t_R/2}.
cplx xi_factor(const TlsParams& tls, double t_R);

// Two-measurement correlation factor of one TLS at lag k,
// xi_k = i w (V/g) sinh(g t_R) e^{-k W t_cyc / 2}.
// No e^{-W t_R/2} envelope: this normalization is the one for which the
// transfer-matrix identity chi_+ = Xi^2 + xi_k^2 holds with the physical
// free-evolution interval, and it reproduces the weak-coupling phase
// correlator exactly.
cplx xi_k_factor(const TlsParams& tls, const RamseyProtocol& protocol, long k);

// r1 = 1/2 + 1/2 e^{-t_R/T2} Re[e^{i phi_R} prod_n Xi^(n)].
// Xi is the characteristic function of the raw accumulated phase, so the
// mean frequency shift of an asymmetric TLS is already carried by the phase
// of Xi (its i V dW/W term); phi_R enters unshifted. Cross-checked against
// the static mixture at W -> 0 and against Monte Carlo.
double r1_tls(const TlsEnsemble& ensemble, const RamseyProtocol& protocol);

// Centered pair correlator by enumeration of all 2^N - 1 nonempty TLS
// subsets:
// r2~(k) = 1/4 e^{-2 t_R/T2} sum_s { Re(e^{i phi_R} [prod_{m in s} xi_k]
//                                     [prod_{n not in s} Xi]) }^2.
// N_TLS is capped (default 20, about 1e6 subsets). With prune = true,
// subtrees whose partial |prod xi_k| falls below 1e-14 times the running
// maximum term are skipped.
double r2_tls_centered(const TlsEnsemble& ensemble,
                       const RamseyProtocol& protocol, long k,
                       bool prune = false, int n_cap = 20);

enum class R1Mode { weak, short_tr, strong };
enum class R2Mode { weak, short_tr, strong_single };

double approx_r1(const TlsEnsemble& ensemble, const RamseyProtocol& protocol,
                 R1Mode mode);
double approx_r2(const TlsEnsemble& ensemble, const RamseyProtocol& protocol,
                 long k, R2Mode mode);

// 2x2 complex transfer matrix, row-major.
struct TransferMatrix {
    std::array<cplx, 4> m;

    cplx operator()(int r, int c) const { return m[2 * r + c]; }
    TransferMatrix mul(const TransferMatrix& o) const;
    std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const;
    cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
};

// T(alpha, t) propagating (chi, X) across an interval of duration t with
// effective coupling alpha in {-V, 0, +V}; prefactor e^{-W t/2}.
TransferMatrix transfer_matrix(const TlsParams& tls, double alpha_V, double t);

// prod_n chi^(n)(t_R), chi = first component of T(V, t_R) (1, dW/W)^T.
cplx characteristic_one_time(const TlsEnsemble& ensemble, double t_R);

// prod_n chi_sign^(n) via T(V,t_R) T(0, k t_cyc - t_R) T(sign V, t_R) acting
// on the stationary vector. The middle interval is the physical gap between
// the end of measurement 0 and the start of measurement k.
cplx characteristic_two_time(const TlsEnsemble& ensemble,
                             const RamseyProtocol& protocol, long k, int sign);

// r2~(k) assembled from the characteristic functions:
// 1/8 e^{-2 t_R/T2} { (chi_- - |chi|^2) + Re[e^{2i phi_R}(chi_+ - chi^2)] }.
// Shares only gamma_param with the subset-sum route.
double r2_via_characteristic(const TlsEnsemble& ensemble,
                             const RamseyProtocol& protocol, long k);

} // namespace ramsey

#endif
