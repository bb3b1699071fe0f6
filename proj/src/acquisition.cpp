#include "ramsey/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ramsey/errors.hpp"
#include "ramsey/quadrature.hpp"

namespace ramsey {

namespace {

void check_m(long M) {
    if (M < 1) throw config_error("block size M must be >= 1");
    if (M > 100000) throw resource_limit_error("block size M above 1e5");
}

// Binomial pmf evaluated in log space so that M up to 1e5 stays finite.
std::vector<double> binomial_pmf(long M, double p) {
    std::vector<double> probs(static_cast<size_t>(M) + 1, 0.0);
    if (p <= 0.0) {
        probs[0] = 1.0;
        return probs;
    }
    if (p >= 1.0) {
        probs.back() = 1.0;
        return probs;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lg_total = std::lgamma(static_cast<double>(M) + 1.0);
    for (long m = 0; m <= M; ++m) {
        const double lc = lg_total - std::lgamma(static_cast<double>(m) + 1.0) -
                          std::lgamma(static_cast<double>(M - m) + 1.0);
        probs[static_cast<size_t>(m)] =
            std::exp(lc + static_cast<double>(m) * lp +
                     static_cast<double>(M - m) * lq);
    }
    return probs;
}

void normalize(std::vector<double>& probs) {
    long double sum = 0.0L;
    for (double v : probs) sum += v;
    if (!(sum > 0.0L)) throw numerical_error("distribution mass vanished");
    for (double& v : probs) v = static_cast<double>(v / sum);
}

// Stationary occupation of the +1 state; rate-free TLSs freeze at 1/2.
double weight_plus(const TlsParams& tls) {
    if (tls.W() == 0.0) return 0.5;
    return tls.W10 / tls.W();
}

bool identical_symmetric(const TlsEnsemble& ensemble) {
    for (const auto& tls : ensemble.tls) {
        if (tls.W01 != tls.W10) return false;
        if (tls.V != ensemble.tls.front().V) return false;
    }
    return true;
}

} // namespace

void OutcomeDistribution::validate() const {
    if (M < 1) throw config_error("block size M must be >= 1");
    if (probs.size() != static_cast<size_t>(M) + 1)
        throw config_error("outcome distribution needs M+1 entries");
    long double sum = 0.0L;
    for (double v : probs) {
        if (!(v >= 0.0)) throw config_error("negative outcome probability");
        sum += v;
    }
    if (std::abs(static_cast<double>(sum - 1.0L)) > 1e-12)
        throw config_error("outcome probabilities must sum to 1");
}

double OutcomeDistribution::mean_m() const {
    long double acc = 0.0L;
    for (size_t m = 0; m < probs.size(); ++m)
        acc += static_cast<long double>(m) * probs[m];
    return static_cast<double>(acc);
}

double OutcomeDistribution::variance_m_over_M() const {
    const long double mu = mean_m() / static_cast<long double>(M);
    long double acc = 0.0L;
    for (size_t m = 0; m < probs.size(); ++m) {
        const long double x = static_cast<long double>(m) / M - mu;
        acc += x * x * probs[m];
    }
    return static_cast<double>(acc);
}

OutcomeDistribution rho_binomial(long M, double r1) {
    check_m(M);
    if (!(r1 >= 0.0 && r1 <= 1.0))
        throw config_error("r1 must lie in [0, 1]");
    OutcomeDistribution d;
    d.M = M;
    d.probs = binomial_pmf(M, r1);
    normalize(d.probs);
    return d;
}

OutcomeDistribution rho_static_tls(long M, const TlsEnsemble& slow,
                                   const RamseyProtocol& protocol) {
    check_m(M);
    protocol.validate();
    slow.validate();
    const int n_sl = static_cast<int>(slow.size());
    if (n_sl > 25)
        throw resource_limit_error(
            "static TLS enumeration limited to 25 fluctuators");

    // (theta, weight) for every frozen configuration.
    std::vector<std::pair<double, double>> terms;
    if (n_sl > 0 && identical_symmetric(slow)) {
        const double v_t = slow.tls.front().V * protocol.t_R;
        terms.reserve(static_cast<size_t>(n_sl) + 1);
        double log_binom = 0.0;
        for (int n = 0; n <= n_sl; ++n) {
            const double weight =
                std::exp(log_binom - n_sl * std::log(2.0));
            terms.emplace_back(v_t * (2.0 * n - n_sl), weight);
            log_binom += std::log(static_cast<double>(n_sl - n)) -
                         std::log(static_cast<double>(n + 1));
        }
    } else {
        terms.reserve(size_t{1} << n_sl);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n_sl);
             ++bits) {
            double theta = 0.0;
            double weight = 1.0;
            for (int n = 0; n < n_sl; ++n) {
                const auto& tls = slow.tls[static_cast<size_t>(n)];
                const double w_plus = weight_plus(tls);
                if (bits >> n & 1) {
                    theta += tls.V * protocol.t_R;
                    weight *= w_plus;
                } else {
                    theta -= tls.V * protocol.t_R;
                    weight *= 1.0 - w_plus;
                }
            }
            terms.emplace_back(theta, weight);
        }
        // Merge configurations that land on the same phase.
        std::sort(terms.begin(), terms.end());
        size_t out = 0;
        for (size_t i = 0; i < terms.size(); ++i) {
            if (out > 0 && terms[i].first == terms[out - 1].first) {
                terms[out - 1].second += terms[i].second;
            } else {
                terms[out++] = terms[i];
            }
        }
        terms.resize(out);
    }

    OutcomeDistribution d;
    d.M = M;
    d.probs.assign(static_cast<size_t>(M) + 1, 0.0);
    if (terms.empty()) terms.emplace_back(0.0, 1.0);
    for (const auto& [theta, weight] : terms) {
        if (weight == 0.0) continue;
        const auto pmf = binomial_pmf(M, ramsey_probability(theta, protocol));
        for (size_t m = 0; m < pmf.size(); ++m)
            d.probs[m] += weight * pmf[m];
    }
    normalize(d.probs);
    return d;
}

OutcomeDistribution rho_static_gauss(long M, double f0,
                                     const RamseyProtocol& protocol) {
    check_m(M);
    protocol.validate();
    if (!(f0 >= 0.0)) throw config_error("f0 must be non-negative");
    if (f0 == 0.0)
        return rho_binomial(M, ramsey_probability(0.0, protocol));

    const double sigma = std::sqrt(f0);
    const double half_width = 8.0 * sigma;
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));

    OutcomeDistribution d;
    d.M = M;
    d.probs.assign(static_cast<size_t>(M) + 1, 0.0);
    const double lg_total = std::lgamma(static_cast<double>(M) + 1.0);
    double worst_error = 0.0;
    for (long m = 0; m <= M; ++m) {
        const double lc = lg_total - std::lgamma(static_cast<double>(m) + 1.0) -
                          std::lgamma(static_cast<double>(M - m) + 1.0);
        auto integrand = [&](double theta) {
            const double p = ramsey_probability(theta, protocol);
            double log_pmf;
            if (p <= 0.0) {
                log_pmf = m == 0 ? 0.0
                                 : -std::numeric_limits<double>::infinity();
            } else if (p >= 1.0) {
                log_pmf = m == M ? 0.0
                                 : -std::numeric_limits<double>::infinity();
            } else {
                log_pmf = lc + static_cast<double>(m) * std::log(p) +
                          static_cast<double>(M - m) * std::log1p(-p);
            }
            const double gauss =
                norm * std::exp(-theta * theta / (2.0 * f0));
            return std::isfinite(log_pmf) ? gauss * std::exp(log_pmf) : 0.0;
        };
        const auto est = integrate_adaptive(integrand, -half_width, half_width,
                                            1e-13, 1e-9);
        d.probs[static_cast<size_t>(m)] = std::max(est.value, 0.0);
        worst_error = std::max(worst_error, est.error);
    }

    long double sum = 0.0L;
    for (double v : d.probs) sum += v;
    if (std::abs(static_cast<double>(sum - 1.0L)) > 1e-10)
        throw numerical_error(
            "static Gaussian distribution failed to normalize to 1e-10");
    normalize(d.probs);
    (void)worst_error;
    return d;
}

double variance_predicted(long M, double r1,
                          const std::vector<double>& r2_centered) {
    check_m(M);
    if (!(r1 >= 0.0 && r1 <= 1.0))
        throw config_error("r1 must lie in [0, 1]");
    long double acc = static_cast<long double>(r1) * (1.0L - r1) / M;
    const long k_max = std::min<long>(M - 1, static_cast<long>(r2_centered.size()));
    for (long k = 1; k <= k_max; ++k)
        acc += 2.0L * (M - k) * r2_centered[static_cast<size_t>(k - 1)] /
               (static_cast<long double>(M) * M);
    return static_cast<double>(acc);
}

double total_variation(const OutcomeDistribution& a,
                       const OutcomeDistribution& b) {
    if (a.M != b.M)
        throw config_error("total variation requires matching block sizes");
    long double acc = 0.0L;
    for (size_t m = 0; m < a.probs.size(); ++m)
        acc += std::abs(a.probs[m] - b.probs[m]);
    return static_cast<double>(0.5L * acc);
}

std::vector<double> rebin_masses(const OutcomeDistribution& d, double lo,
                                 double hi, int n_bins) {
    if (n_bins < 1) throw config_error("need at least one bin");
    if (!(hi > lo)) throw config_error("bin range must be increasing");
    std::vector<double> bins(static_cast<size_t>(n_bins), 0.0);
    const double width = (hi - lo) / n_bins;
    for (size_t m = 0; m < d.probs.size(); ++m) {
        const double x = static_cast<double>(m) / d.M;
        if (x < lo || x > hi) continue;
        auto idx = static_cast<long>((x - lo) / width);
        idx = std::clamp<long>(idx, 0, n_bins - 1);
        bins[static_cast<size_t>(idx)] += d.probs[m];
    }
    return bins;
}

} // namespace ramsey
