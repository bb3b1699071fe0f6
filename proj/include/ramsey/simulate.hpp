#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ramsey/analytic_gaussian.hpp"
#include "ramsey/noise_spectra.hpp"
#include "ramsey/protocol.hpp"
#include "ramsey/rng.hpp"
#include "ramsey/tls.hpp"

namespace ramsey {

// Coherent qubit-frequency modulation a_p cos(omega_p t + phi_p); the phase
// phi_p is drawn uniformly per repetition by run_experiment.
struct Modulation {
    double a_p = 0.0;
    double omega_p = 1.0;
};

struct SimulationConfig {
    RamseyProtocol protocol;
    TlsEnsemble tls;                           // empty: no telegraph noise
    std::optional<GaussianNoiseSpec> gaussian;  // unset: no Gaussian noise
    std::optional<Modulation> modulation;

    long N = 100000; // cycles per repetition
    int R = 30;      // repetitions

    // telegraph grid step; must divide t_R and t_cyc
    std::optional<double> dt;     // default 0.1 t_R
    std::optional<long> k_corr;   // Gaussian window; default per spectrum
    double sigma_cyc = 0.0;       // cycle-period jitter std
    std::uint64_t seed = 0;

    // Swaps the dt-grid telegraph sampler for the event-driven one. The grid
    // sampler reproduces the reference algorithm; the exact one has no
    // discretization error and is much faster for slow TLSs.
    bool use_exact_tls_sampler = false;

    double step_budget = 1e10;
    int threads = 0; // 0: hardware concurrency

    void validate() const;
    double resolved_dt() const;
    long resolved_k_corr() const; // requires gaussian
};

struct PhaseSequence {
    std::vector<double> theta;
};

struct OutcomeSeries {
    std::vector<std::uint8_t> x;

    double mean() const;
};

// Telegraph phases on the dt grid: each TLS starts from its stationary
// distribution and flips with probability W*dt per step; theta_k integrates
// sum_n V^(n) d^(n)(t) dt over the Ramsey window of cycle k.
PhaseSequence sample_tls_phases(const TlsEnsemble& ensemble,
                                const SimulationConfig& config, Stream stream);

// Event-driven telegraph sampler (exponential waiting times, exact window
// overlap integrals). Cross-check oracle for sample_tls_phases.
PhaseSequence sample_tls_phases_exact(const TlsEnsemble& ensemble,
                                      const RamseyProtocol& protocol, long N,
                                      Stream stream);

// Dimensionless frequency path D(m) = sum_n V^(n) t_R d^(n)(m dt) on a plain
// dt grid (no Ramsey windows), for spectral estimation. Same telegraph
// convention and per-TLS substreams as sample_tls_phases.
std::vector<double> sample_frequency_path(const TlsEnsemble& ensemble,
                                          const RamseyProtocol& protocol,
                                          double dt, long n_steps,
                                          Stream stream);

// Precomputed conditional-sampling coefficients for a stationary Gaussian
// phase sequence with covariance cov(theta_i, theta_j) = f(|i-j|).
struct GaussianSamplerPlan {
    long k_corr = 0;
    std::vector<std::vector<double>> chol_head; // joint draw of first k_corr+1
    std::vector<double> ar_coeff;               // fixed-window conditional mean
    double innovation_std = 0.0;

    static GaussianSamplerPlan build(const PhaseCorrelators& f, long k_corr);
};

PhaseSequence sample_gaussian_phases(const GaussianSamplerPlan& plan, long N,
                                     Stream stream);
PhaseSequence sample_gaussian_phases(const PhaseCorrelators& f, long N,
                                     long k_corr, Stream stream);

// Adds A_p cos(omega_p T_k + phi_p + omega_p t_R/2) with
// A_p = (2 a_p/omega_p) sin(omega_p t_R/2) and T_k the start of cycle k;
// cycle periods acquire iid N(t_cyc, sigma_cyc^2) jitter when sigma_cyc > 0.
PhaseSequence inject_modulation(const PhaseSequence& theta, double a_p,
                                double omega_p, const RamseyProtocol& protocol,
                                double phase_p, double sigma_cyc,
                                Stream stream);

OutcomeSeries sample_outcomes(const PhaseSequence& theta,
                              const RamseyProtocol& protocol, Stream stream);

// R independent repetitions with per-(repetition, source) streams; results
// are ordered by repetition index regardless of thread count.
std::vector<OutcomeSeries> run_experiment(const SimulationConfig& config);

// Phase sequence of repetition `rep` under `config` (no outcome sampling).
PhaseSequence simulate_phases(const SimulationConfig& config, int rep);

} // namespace ramsey
