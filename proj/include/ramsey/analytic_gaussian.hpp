#pragma once

#include <functional>
#include <vector>

#include "ramsey/noise_spectra.hpp"
#include "ramsey/protocol.hpp"
#include "ramsey/tls.hpp"

namespace ramsey {

// Covariances f_k = <theta_n theta_{n+k}> of the phase accumulated per
// measurement window, k = 0..K.
struct PhaseCorrelators {
    std::vector<double> f;

    long max_lag() const { return static_cast<long>(f.size()) - 1; }
    double at(long k) const;
    void validate() const;
};

// Closed-form f_k for the named spectra; Tabulated falls back to quadrature.
double phase_correlator(const GaussianNoiseSpec& spec,
                        const RamseyProtocol& protocol, long k);

PhaseCorrelators correlators_from_spectrum(const GaussianNoiseSpec& spec,
                                           const RamseyProtocol& protocol,
                                           long max_lag);

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
};

// f_k by direct adaptive integration of S_q against the window kernel:
// (2/pi) Int_0^inf S_q(w) cos(w k t_cyc) (1 - cos(w t_R)) / w^2 dw.
// Intended for modest lags; cancellation between oscillatory pieces makes
// large k expensive.
double phase_correlator_quadrature(const std::function<double(double)>& S_q,
                                   const RamseyProtocol& protocol, long k,
                                   const QuadratureOptions& options = {});

// High-accuracy f_k for the soft-cutoff 1/f model via its switching-rate
// representation (non-oscillatory integrand), usable for any k.
double one_over_f_correlator_quadrature(const OneOverF& spec,
                                        const RamseyProtocol& protocol,
                                        long k);

// Logarithmic approximation valid for omega_min * k * t_cyc below ~0.1.
double log_approx_f_k(const OneOverF& spec, const RamseyProtocol& protocol,
                      long k);

// Exponential large-lag asymptote, omega_min * k * t_cyc well above 1.
double one_over_f_large_k_asymptote(const OneOverF& spec,
                                    const RamseyProtocol& protocol, long k);

double r1_gauss(double f0, const RamseyProtocol& protocol);

double r2_gauss_centered(double f0, double f_k, const RamseyProtocol& protocol);
double r2_gauss_centered(const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k);

double r3_gauss_centered(double f0, double f_k, double f_l, double f_lk,
                         const RamseyProtocol& protocol);
double r3_gauss_centered(const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k, long l);

// Inversion of the Gaussian identities: f0 from r1, then each f_k from the
// measured two-point function (closed form at cos(2 phi_R) = 0, monotone
// root-finding otherwise).
PhaseCorrelators infer_f_from_measurements(double r1_meas,
                                           const std::vector<double>& r2_meas,
                                           const RamseyProtocol& protocol);

// (measured three-point value - Gaussian prediction) / stderr
double gaussianity_score(double r3_meas, double r3_stderr,
                         const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k, long l);

// Lorentzian-sum spectrum of a TLS ensemble; static (W=0) members carry no
// weight at nonzero frequency and are skipped.
double tls_spectrum_theory(const TlsEnsemble& ensemble, double omega);

} // namespace ramsey
