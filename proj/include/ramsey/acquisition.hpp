#pragma once

#include <vector>

#include "ramsey/protocol.hpp"
#include "ramsey/tls.hpp"

namespace ramsey {

// Distribution of the number m of "1" outcomes in a block of M measurements.
struct OutcomeDistribution {
    long M = 0;
    std::vector<double> probs; // indexed by m = 0..M

    void validate() const;
    double mean_m() const;
    double variance_m_over_M() const;
};

OutcomeDistribution rho_binomial(long M, double r1);

// Block distribution for TLSs frozen on the acquisition timescale
// (interpretation requires M W t_cyc << 1; not enforced). Identical
// symmetric ensembles collapse to the size+1 term form.
OutcomeDistribution rho_static_tls(long M, const TlsEnsemble& slow,
                                   const RamseyProtocol& protocol);

// Block distribution for Gaussian noise frozen within each block.
OutcomeDistribution rho_static_gauss(long M, double f0,
                                     const RamseyProtocol& protocol);

// Variance of m/M including correlation broadening:
// r1(1-r1)/M + (2/M^2) sum_{k=1}^{M-1} (M-k) r2_centered(k).
// Lags beyond the supplied series are treated as zero.
double variance_predicted(long M, double r1,
                          const std::vector<double>& r2_centered);

double total_variation(const OutcomeDistribution& a,
                       const OutcomeDistribution& b);

// Aggregates probability mass into equal-width bins of m/M over [lo, hi].
std::vector<double> rebin_masses(const OutcomeDistribution& d, double lo,
                                 double hi, int n_bins);

} // namespace ramsey
