#include "ramsey/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <fftw3.h>

#include "ramsey/errors.hpp"

namespace ramsey {

namespace {

// Exact integer sufficient statistics of one repetition. Everything needed
// to recenter with any mean, so the jackknife can drop a repetition without
// touching the raw series again.
struct RepStats {
    long n = 0; // series length
    long s = 0; // sum of x

    // per pair lag k = 1..k_max, window n = 0..N-1-k
    std::vector<long> pair_prod; // sum x_n x_{n+k}
    std::vector<long> pair_head; // sum x_n
    std::vector<long> pair_tail; // sum x_{n+k}

    // per requested triple (k, l), window n = 0..N-1-l
    std::vector<long> trip_prod;    // sum x_n x_{n+k} x_{n+l}
    std::vector<long> trip_pair_0k; // sum x_n x_{n+k}
    std::vector<long> trip_pair_0l; // sum x_n x_{n+l}
    std::vector<long> trip_pair_kl; // sum x_{n+k} x_{n+l}
    std::vector<long> trip_sum_0;   // sum x_n
    std::vector<long> trip_sum_k;   // sum x_{n+k}
    std::vector<long> trip_sum_l;   // sum x_{n+l}
};

RepStats accumulate_stats(const std::vector<std::uint8_t>& x, long k_max,
                          const std::vector<std::pair<long, long>>& triples) {
    RepStats st;
    const long n = static_cast<long>(x.size());
    st.n = n;

    std::vector<long> prefix(static_cast<size_t>(n) + 1, 0);
    for (long i = 0; i < n; ++i)
        prefix[static_cast<size_t>(i) + 1] =
            prefix[static_cast<size_t>(i)] + x[static_cast<size_t>(i)];
    st.s = prefix[static_cast<size_t>(n)];

    st.pair_prod.resize(static_cast<size_t>(k_max), 0);
    st.pair_head.resize(static_cast<size_t>(k_max), 0);
    st.pair_tail.resize(static_cast<size_t>(k_max), 0);
    for (long k = 1; k <= k_max; ++k) {
        long prod = 0;
        for (long i = 0; i + k < n; ++i)
            prod += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i + k)];
        st.pair_prod[static_cast<size_t>(k - 1)] = prod;
        st.pair_head[static_cast<size_t>(k - 1)] =
            prefix[static_cast<size_t>(n - k)];
        st.pair_tail[static_cast<size_t>(k - 1)] =
            st.s - prefix[static_cast<size_t>(k)];
    }

    const size_t nt = triples.size();
    st.trip_prod.resize(nt, 0);
    st.trip_pair_0k.resize(nt, 0);
    st.trip_pair_0l.resize(nt, 0);
    st.trip_pair_kl.resize(nt, 0);
    st.trip_sum_0.resize(nt, 0);
    st.trip_sum_k.resize(nt, 0);
    st.trip_sum_l.resize(nt, 0);
    for (size_t t = 0; t < nt; ++t) {
        const long k = triples[t].first;
        const long l = triples[t].second;
        long prod = 0, p0k = 0, p0l = 0, pkl = 0;
        for (long i = 0; i + l < n; ++i) {
            const long a = x[static_cast<size_t>(i)];
            const long b = x[static_cast<size_t>(i + k)];
            const long c = x[static_cast<size_t>(i + l)];
            prod += a * b * c;
            p0k += a * b;
            p0l += a * c;
            pkl += b * c;
        }
        st.trip_prod[t] = prod;
        st.trip_pair_0k[t] = p0k;
        st.trip_pair_0l[t] = p0l;
        st.trip_pair_kl[t] = pkl;
        st.trip_sum_0[t] = prefix[static_cast<size_t>(n - l)];
        st.trip_sum_k[t] = prefix[static_cast<size_t>(n - l + k)] -
                           prefix[static_cast<size_t>(k)];
        st.trip_sum_l[t] = st.s - prefix[static_cast<size_t>(l)];
    }
    return st;
}

struct PointValues {
    double r1 = 0.0;
    std::vector<double> r2;
    std::vector<double> r3;
};

// Correlator values over all repetitions except `exclude` (-1: none).
PointValues combine_stats(const std::vector<RepStats>& stats, long k_max,
                          const std::vector<std::pair<long, long>>& triples,
                          bool per_rep_center, int exclude) {
    PointValues out;
    out.r2.assign(static_cast<size_t>(k_max), 0.0);
    out.r3.assign(triples.size(), 0.0);

    long double s_tot = 0.0L, n_tot = 0.0L;
    for (size_t i = 0; i < stats.size(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        s_tot += stats[i].s;
        n_tot += stats[i].n;
    }
    const long double mu_global = s_tot / n_tot;
    out.r1 = static_cast<double>(mu_global);

    std::vector<long double> num(static_cast<size_t>(k_max) + triples.size(),
                                 0.0L);
    std::vector<long double> den(num.size(), 0.0L);
    for (size_t i = 0; i < stats.size(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        const RepStats& st = stats[i];
        const long double mu =
            per_rep_center ? static_cast<long double>(st.s) / st.n : mu_global;
        for (long k = 1; k <= k_max; ++k) {
            const size_t j = static_cast<size_t>(k - 1);
            const long double cnt = st.n - k;
            num[j] += st.pair_prod[j] -
                      mu * (st.pair_head[j] + st.pair_tail[j]) +
                      cnt * mu * mu;
            den[j] += cnt;
        }
        for (size_t t = 0; t < triples.size(); ++t) {
            const size_t j = static_cast<size_t>(k_max) + t;
            const long double cnt = st.n - triples[t].second;
            num[j] += st.trip_prod[t] -
                      mu * (st.trip_pair_0k[t] + st.trip_pair_0l[t] +
                            st.trip_pair_kl[t]) +
                      mu * mu *
                          (st.trip_sum_0[t] + st.trip_sum_k[t] +
                           st.trip_sum_l[t]) -
                      cnt * mu * mu * mu;
            den[j] += cnt;
        }
    }
    for (long k = 0; k < k_max; ++k) {
        const size_t j = static_cast<size_t>(k);
        out.r2[j] = static_cast<double>(num[j] / den[j]);
    }
    for (size_t t = 0; t < triples.size(); ++t) {
        const size_t j = static_cast<size_t>(k_max) + t;
        out.r3[t] = static_cast<double>(num[j] / den[j]);
    }
    return out;
}

void run_rep_pool(int n_reps, const std::function<void(int)>& body) {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n_reps) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };
    int n_threads = static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, n_reps);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

// |DFT|^2 of real rows, accumulated as a mean across rows. `sign` picks the
// exponent e^{sign * 2 pi i m n / N}; the magnitude is sign-independent but
// each caller states its own written convention.
std::vector<double> mean_periodogram(
    size_t n, size_t rows, int sign,
    const std::function<const double*(size_t)>& row) {
    if (n > static_cast<size_t>(std::numeric_limits<int>::max()))
        throw resource_limit_error("series too long for the DFT");
    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()),
        sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    std::vector<long double> acc(n, 0.0L);
    for (size_t r = 0; r < rows; ++r) {
        const double* src = row(r);
        for (size_t i = 0; i < n; ++i) in[i] = {src[i], 0.0};
        fftw_execute(plan);
        for (size_t m = 0; m < n; ++m) acc[m] += std::norm(out[m]);
    }
    fftw_destroy_plan(plan);
    std::vector<double> mean(n);
    for (size_t m = 0; m < n; ++m)
        mean[m] = static_cast<double>(acc[m] / static_cast<long double>(rows));
    return mean;
}

} // namespace

CorrelatorEstimates estimate_correlators(
    const std::vector<OutcomeSeries>& series, long k_max,
    const std::vector<std::pair<long, long>>& triple_lags,
    bool center_per_repetition) {
    if (series.empty())
        throw config_error("estimate_correlators: no outcome series");
    if (k_max < 0) throw config_error("estimate_correlators: k_max < 0");
    long l_max = k_max;
    for (const auto& [k, l] : triple_lags) {
        if (k < 1 || l <= k)
            throw config_error(
                "estimate_correlators: triple lags require l > k >= 1");
        l_max = std::max(l_max, l);
    }
    for (const auto& s : series)
        if (static_cast<long>(s.x.size()) < l_max + 1)
            throw config_error(
                "estimate_correlators: series shorter than largest lag + 1");

    const int R = static_cast<int>(series.size());
    std::vector<RepStats> stats(static_cast<size_t>(R));
    run_rep_pool(R, [&](int i) {
        stats[static_cast<size_t>(i)] =
            accumulate_stats(series[static_cast<size_t>(i)].x, k_max,
                             triple_lags);
    });

    const PointValues full =
        combine_stats(stats, k_max, triple_lags, center_per_repetition, -1);

    CorrelatorEstimates out;
    out.repetitions = R;
    out.triple_lags = triple_lags;
    out.r1.value = full.r1;
    out.r2.resize(full.r2.size());
    out.r3.resize(full.r3.size());
    for (size_t j = 0; j < full.r2.size(); ++j) out.r2[j].value = full.r2[j];
    for (size_t j = 0; j < full.r3.size(); ++j) out.r3[j].value = full.r3[j];
    if (R < 2) return out;

    std::vector<PointValues> loo(static_cast<size_t>(R));
    for (int j = 0; j < R; ++j)
        loo[static_cast<size_t>(j)] =
            combine_stats(stats, k_max, triple_lags, center_per_repetition, j);

    auto jackknife = [R, &loo](const std::function<double(const PointValues&)>&
                                   pick) {
        long double mean = 0.0L;
        for (const auto& v : loo) mean += pick(v);
        mean /= R;
        long double ss = 0.0L;
        for (const auto& v : loo) {
            const long double d = pick(v) - mean;
            ss += d * d;
        }
        return static_cast<double>(
            std::sqrt(static_cast<long double>(R - 1) / R * ss));
    };

    out.r1.std_error = jackknife([](const PointValues& v) { return v.r1; });
    for (size_t j = 0; j < out.r2.size(); ++j)
        out.r2[j].std_error =
            jackknife([j](const PointValues& v) { return v.r2[j]; });
    for (size_t j = 0; j < out.r3.size(); ++j)
        out.r3[j].std_error =
            jackknife([j](const PointValues& v) { return v.r3[j]; });
    return out;
}

OutcomeDistribution block_histogram(const std::vector<OutcomeSeries>& series,
                                    long M) {
    if (series.empty()) throw config_error("block_histogram: no outcome series");
    if (M < 1) throw config_error("block_histogram: block size must be >= 1");
    std::vector<long> counts(static_cast<size_t>(M) + 1, 0);
    long blocks = 0;
    for (const auto& s : series) {
        const long n = static_cast<long>(s.x.size());
        if (n < M)
            throw config_error("block_histogram: series shorter than block");
        const long nb = n / M;
        for (long b = 0; b < nb; ++b) {
            long ones = 0;
            for (long i = b * M; i < (b + 1) * M; ++i)
                ones += s.x[static_cast<size_t>(i)];
            ++counts[static_cast<size_t>(ones)];
            ++blocks;
        }
    }
    OutcomeDistribution out;
    out.M = M;
    out.probs.resize(static_cast<size_t>(M) + 1);
    for (size_t i = 0; i < out.probs.size(); ++i)
        out.probs[i] = static_cast<double>(
            static_cast<long double>(counts[i]) / blocks);
    out.validate();
    return out;
}

void SpectrumEstimate::validate() const {
    if (R.empty()) throw config_error("SpectrumEstimate: empty spectrum");
    double peak = 0.0;
    for (double v : R) {
        if (!(v >= 0.0))
            throw numerical_error("SpectrumEstimate: negative power");
        peak = std::max(peak, v);
    }
    const size_t n = R.size();
    for (size_t m = 1; m < n; ++m)
        if (std::abs(R[m] - R[n - m]) > 1e-9 * peak)
            throw numerical_error("SpectrumEstimate: mirror symmetry broken");
}

SpectrumEstimate outcome_power_spectrum(
    const std::vector<OutcomeSeries>& series) {
    if (series.empty())
        throw config_error("outcome_power_spectrum: no outcome series");
    const size_t n = series[0].x.size();
    if (n == 0) throw config_error("outcome_power_spectrum: empty series");
    for (const auto& s : series)
        if (s.x.size() != n)
            throw config_error("outcome_power_spectrum: length mismatch");

    std::vector<double> buffer(n);
    SpectrumEstimate est;
    est.R = mean_periodogram(n, series.size(), +1, [&](size_t r) {
        const auto& x = series[r].x;
        for (size_t i = 0; i < n; ++i) buffer[i] = x[i];
        return buffer.data();
    });
    est.repetitions = static_cast<int>(series.size());
    est.normalization =
        "R(m) = mean over repetitions of |sum_n x_n exp(+2 pi i m n/N)|^2";
    return est;
}

double modulation_peak_theory(double A_p, const RamseyProtocol& protocol,
                              long N, double omega_p, long m,
                              double sigma_cyc) {
    protocol.validate();
    if (N < 1) throw config_error("modulation_peak_theory: N must be >= 1");
    if (sigma_cyc < 0.0)
        throw config_error("modulation_peak_theory: sigma_cyc < 0");
    const double s_phi = std::sin(protocol.phi_R);
    const double pref = 0.125 * A_p * A_p * s_phi * s_phi *
                        std::exp(-2.0 * protocol.t_R_over_T2);
    const double delta_m = 2.0 * kPi * static_cast<double>(m) /
                               static_cast<double>(N) -
                           omega_p * protocol.t_cyc;
    // N omega_p t_cyc = 2 pi m - N delta_m, so trigonometric factors of
    // N omega_p t_cyc reduce to functions of N delta_m; evaluating them that
    // way avoids the cancellation of the huge raw argument.
    const double nd = static_cast<double>(N) * delta_m;
    const double d_cyc = 0.5 * omega_p * omega_p * sigma_cyc * sigma_cyc;
    if (d_cyc == 0.0) {
        if (delta_m == 0.0)
            return pref * 0.5 * static_cast<double>(N) *
                   static_cast<double>(N);
        const double s = std::sin(0.5 * nd);
        return pref * 2.0 * s * s / (delta_m * delta_m);
    }
    const double d2 = delta_m * delta_m;
    const double c2 = d_cyc * d_cyc;
    const double damp = std::exp(-static_cast<double>(N) * d_cyc);
    const double cos_n = std::cos(nd);
    const double sin_n = -std::sin(nd);
    const double brace = (d2 - c2) * (1.0 - damp * cos_n) -
                         2.0 * delta_m * d_cyc * damp * sin_n +
                         static_cast<double>(N) * d_cyc * (d2 + c2);
    return pref * brace / ((d2 + c2) * (d2 + c2));
}

SpectrumEstimate noise_power_spectrum(
    const std::vector<std::vector<double>>& paths, double dt, double t_R) {
    if (paths.empty()) throw config_error("noise_power_spectrum: no paths");
    if (!(dt > 0.0)) throw config_error("noise_power_spectrum: dt must be > 0");
    if (!(t_R > 0.0))
        throw config_error("noise_power_spectrum: t_R must be > 0");
    const size_t n = paths[0].size();
    if (n == 0) throw config_error("noise_power_spectrum: empty path");
    for (const auto& p : paths)
        if (p.size() != n)
            throw config_error("noise_power_spectrum: length mismatch");

    SpectrumEstimate est;
    est.R = mean_periodogram(n, paths.size(), -1,
                             [&](size_t r) { return paths[r].data(); });
    const double scale = dt / (t_R * t_R * static_cast<double>(n));
    for (double& v : est.R) v *= scale;
    est.repetitions = static_cast<int>(paths.size());
    est.normalization =
        "S(omega_k) = dt/t_R^2 mean over paths of "
        "|sum_m D(m) exp(-2 pi i m k/N)|^2 / N, omega_k = 2 pi k/(N dt)";
    return est;
}

std::vector<double> spectrum_frequencies(long n_bins, double spacing) {
    if (n_bins < 1)
        throw config_error("spectrum_frequencies: n_bins must be >= 1");
    if (!(spacing > 0.0))
        throw config_error("spectrum_frequencies: spacing must be > 0");
    std::vector<double> omega(static_cast<size_t>(n_bins));
    for (long k = 0; k < n_bins; ++k)
        omega[static_cast<size_t>(k)] =
            2.0 * kPi * static_cast<double>(k) /
            (static_cast<double>(n_bins) * spacing);
    return omega;
}

} // namespace ramsey
