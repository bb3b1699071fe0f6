#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ramsey/acquisition.hpp"
#include "ramsey/protocol.hpp"
#include "ramsey/simulate.hpp"

namespace ramsey {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct CorrelatorEstimates {
    Estimate r1;
    std::vector<Estimate> r2;                       // lag k = index + 1
    std::vector<std::pair<long, long>> triple_lags; // echoes the request
    std::vector<Estimate> r3;                       // aligned with triple_lags
    int repetitions = 0;
};

// Sample correlators of binary outcome series:
//   r1      = mean of x_n
//   r2~(k)  = mean over n of (x_{n+k} - r1)(x_n - r1),                k >= 1
//   r3~(k,l)= mean over n of (x_{n+l} - r1)(x_{n+k} - r1)(x_n - r1),  l > k
// Centering uses the dataset-wide mean by default so the estimates are
// directly comparable to the ensemble theory; center_per_repetition switches
// to each repetition's own mean. Standard errors are leave-one-repetition-out
// jackknife estimates (zero when only one repetition is supplied).
// Requires nonempty input and every series length >= largest lag + 1.
CorrelatorEstimates estimate_correlators(
    const std::vector<OutcomeSeries>& series, long k_max,
    const std::vector<std::pair<long, long>>& triple_lags = {},
    bool center_per_repetition = false);

// Chops each series into floor(N/M) disjoint blocks of M consecutive cycles,
// counts the ones per block, and aggregates the counts over all repetitions
// into a normalized histogram on m = 0..M. Leftover cycles are dropped.
// Requires every series length >= M.
OutcomeDistribution block_histogram(const std::vector<OutcomeSeries>& series,
                                    long M);

struct SpectrumEstimate {
    std::vector<double> R; // DFT bins m = 0..N-1
    int repetitions = 0;
    std::string normalization;

    // Mirror symmetry R(m) = R(N-m) and nonnegativity, as expected for the
    // averaged periodogram of real input.
    void validate() const;
};

// R(m) = mean over repetitions of |X(m)|^2 with
//   X(m) = sum_n x_n exp(+2 pi i m n / N)
// (plain periodogram, no 1/N, no tapering). All series must share one length.
// Parseval per repetition: sum_m |X(m)|^2 = N sum_n x_n^2.
SpectrumEstimate outcome_power_spectrum(
    const std::vector<OutcomeSeries>& series);

// Spectral peak of a weak slow frequency modulation near the bin
// m ~ N omega_p t_cyc / (2 pi), with Delta_m = 2 pi m / N - omega_p t_cyc.
// For sigma_cyc = 0:
//   R(m) = (1/8) A_p^2 sin^2(phi_R) e^{-2 t_R/T2}
//          (1 - cos(N omega_p t_cyc)) / Delta_m^2,
// which is finite at Delta_m -> 0 (peak height N^2/2 times the prefactor).
// Cycle-period jitter with std sigma_cyc damps the peak; with
// Delta_cyc = omega_p^2 sigma_cyc^2 / 2:
//   R(m) = (1/8) A_p^2 sin^2(phi_R) e^{-2 t_R/T2} (Delta_m^2 + Delta_cyc^2)^{-2}
//          { (Delta_m^2 - Delta_cyc^2) [1 - e^{-N Delta_cyc} cos(N omega_p t_cyc)]
//            - 2 Delta_m Delta_cyc e^{-N Delta_cyc} sin(N omega_p t_cyc)
//            + N Delta_cyc (Delta_m^2 + Delta_cyc^2) },
// whose maximum grows like N (not N^2) once N Delta_cyc >> 1.
double modulation_peak_theory(double A_p, const RamseyProtocol& protocol,
                              long N, double omega_p, long m,
                              double sigma_cyc);

// Spectral density estimated from frequency paths D(m) sampled with step dt
// (D as produced by sample_frequency_path, dimensionless through the t_R
// factor):
//   S_q(omega_k) = (dt / t_R^2) mean over paths of
//                  |sum_m D(m) exp(-2 pi i m k / Ntilde)|^2 / Ntilde,
// with omega_k = 2 pi k / (Ntilde dt). The dt/t_R^2 factor converts the
// per-step periodogram of the dimensionless path into the physical density
// normalized like tls_spectrum_theory. All paths must share one length.
SpectrumEstimate noise_power_spectrum(
    const std::vector<std::vector<double>>& paths, double dt,
    double t_R = 1.0);

// omega_k = 2 pi k / (n_bins * spacing) for k = 0..n_bins-1
std::vector<double> spectrum_frequencies(long n_bins, double spacing);

} // namespace ramsey
