// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria, so a clean run exits 0.
// Tolerances and seeds are pinned here; a FAIL line reports the measured
// values so a regression (or an honest discrepancy) is visible directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "ramsey/acquisition.hpp"
#include "ramsey/analytic_gaussian.hpp"
#include "ramsey/analytic_tls.hpp"
#include "ramsey/estimate.hpp"
#include "ramsey/simulate.hpp"

using namespace ramsey;

namespace {

struct Result {
    bool pass = true;
    std::string headline;
    std::vector<std::string> detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

Result c1_dual_route() {
    const RamseyProtocol prot;
    Stream st = Stream::root(101);
    double worst_r1 = 0.0, worst_r2 = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(st.next_double() * 6.0);
        TlsEnsemble ens;
        for (int i = 0; i < n; ++i) {
            const double sign = st.next_double() < 0.5 ? -1.0 : 1.0;
            const double V =
                sign * std::exp(std::log(0.05) +
                                st.next_double() * std::log(2.0 / 0.05));
            const auto rate = [&] {
                return std::exp(std::log(1e-3) +
                                st.next_double() * std::log(3.0 / 1e-3));
            };
            ens.tls.push_back({V, rate(), rate()});
        }
        const std::complex<double> ophi(0.0, prot.phi_R);
        const double r1_char =
            0.5 + 0.5 * std::real(std::exp(ophi) *
                                  characteristic_one_time(ens, prot.t_R));
        worst_r1 = std::max(worst_r1, std::abs(r1_tls(ens, prot) - r1_char));
        for (long k = 1; k <= 50; ++k)
            worst_r2 = std::max(
                worst_r2, std::abs(r2_tls_centered(ens, prot, k) -
                                   r2_via_characteristic(ens, prot, k)));
    }
    Result r;
    r.pass = worst_r1 <= 1e-10 && worst_r2 <= 1e-10;
    r.headline = fmt("max |closed - characteristic|: r1 %.2e, r2 %.2e "
                     "(bound 1e-10, 200 ensembles, k <= 50)",
                     worst_r1, worst_r2);
    return r;
}

// ---------------------------------------------------------------- criterion 2

Result c2_tls_ladder() {
    const RamseyProtocol prot;
    SimulationConfig sim;
    sim.protocol = prot;
    sim.tls = symmetric_ladder(10, 0.2, 0.75, 0.0);
    sim.N = 100000;
    sim.R = 300;
    sim.seed = 21;
    const auto est = estimate_correlators(run_experiment(sim), 60);

    const double r1_err = std::abs(est.r1.value - r1_tls(sim.tls, prot));
    double z_max = 0.0;
    for (long k = 1; k <= 60; ++k) {
        const auto& e = est.r2[size_t(k - 1)];
        const double z =
            (e.value - r2_tls_centered(sim.tls, prot, k)) / e.std_error;
        z_max = std::max(z_max, std::abs(z));
    }
    Result r;
    r.pass = r1_err <= 1e-3 && z_max <= 3.0;
    r.headline = fmt("|r1_sim - r1| = %.2e (bound 1e-3), max |z(r2)| = %.2f "
                     "(bound 3) over k <= 60 at R = 300",
                     r1_err, z_max);
    return r;
}

// ---------------------------------------------------------------- criterion 3

Result c3_gaussian_working_point() {
    const RamseyProtocol prot;
    const ExpCorrelated spec{6.51, 20.0};
    const double f0 = phase_correlator(spec, prot, 0);
    const double r1_th = r1_gauss(f0, prot);

    SimulationConfig sim;
    sim.protocol = prot;
    sim.gaussian = spec;
    sim.seed = 31;
    std::vector<std::pair<long, long>> lags;
    for (long k = 1; k <= 40; ++k) lags.emplace_back(k, k + 3);
    const auto est = estimate_correlators(run_experiment(sim), 40, lags);

    const auto f = correlators_from_spectrum(spec, prot, 43);
    double z2 = 0.0, z3 = 0.0;
    for (long k = 1; k <= 40; ++k) {
        const auto& e2 = est.r2[size_t(k - 1)];
        const auto& e3 = est.r3[size_t(k - 1)];
        z2 = std::max(z2, std::abs((e2.value - r2_gauss_centered(f, prot, k)) /
                                   e2.std_error));
        z3 = std::max(z3,
                      std::abs((e3.value - r3_gauss_centered(f, prot, k, k + 3)) /
                               e3.std_error));
    }
    Result r;
    r.pass = std::abs(f0 - 0.160) <= 1e-3 && std::abs(r1_th - 0.826) <= 1e-3 &&
             z2 <= 3.0 && z3 <= 3.0;
    r.headline = fmt("f0 = %.5f (0.160 +- 0.001), r1 = %.5f (0.826 +- 0.001), "
                     "max |z| r2 %.2f r3 %.2f (bound 3, k <= 40)",
                     f0, r1_th, z2, z3);
    return r;
}

// ---------------------------------------------------------------- criterion 4

Result c4_one_over_f_forms() {
    const RamseyProtocol prot;
    Result r;
    double worst_rel = 0.0;
    for (const double D : {0.02574, 0.04087}) {
        for (const double wmin : {1e-5, 1e-3}) {
            const OneOverF spec{D, wmin};
            for (long k = 0; k <= 1000; ++k) {
                const double exact = phase_correlator(spec, prot, k);
                const double quad =
                    one_over_f_correlator_quadrature(spec, prot, k);
                worst_rel =
                    std::max(worst_rel, std::abs(exact - quad) / std::abs(quad));
            }
        }
    }
    const bool quad_ok = worst_rel <= 1e-8;

    // log approximation: good while k omega_min t_cyc <= 0.1, broken by 1
    bool approx_ok = true;
    double worst_small = 0.0;
    std::array<double, 2> err_at_one{};
    int idx = 0;
    for (const double wmin : {1e-5, 1e-3}) {
        const OneOverF spec{0.02574, wmin};
        const long k_small = static_cast<long>(0.1 / (wmin * prot.t_cyc));
        for (long k = 1; k <= k_small; ++k) {
            const double exact = phase_correlator(spec, prot, k);
            const double rel =
                std::abs(log_approx_f_k(spec, prot, k) - exact) /
                std::abs(exact);
            worst_small = std::max(worst_small, rel);
            if (rel > 0.10) approx_ok = false;
        }
        const long k_one =
            static_cast<long>(std::ceil(1.0 / (wmin * prot.t_cyc)));
        const double exact = phase_correlator(spec, prot, k_one);
        err_at_one[size_t(idx++)] =
            std::abs(log_approx_f_k(spec, prot, k_one) - exact) /
            std::abs(exact);
        if (err_at_one[size_t(idx - 1)] <= 0.10) approx_ok = false;
    }
    r.pass = quad_ok && approx_ok;
    r.headline = fmt("closed form vs quadrature max rel err %.2e (bound 1e-8, "
                     "k <= 1000)",
                     worst_rel);
    r.detail.push_back(fmt(
        "log approx: max rel err %.3f for k w_min t_cyc <= 0.1 (bound 0.10); "
        "rel err at k w_min t_cyc = 1: %.3f / %.3f (must exceed 0.10)",
        worst_small, err_at_one[0], err_at_one[1]));
    return r;
}

// ---------------------------------------------------------------- criterion 5

Result c5_table_broadening() {
    const RamseyProtocol prot;
    const long M = 10000;
    struct Row {
        const char* label;
        TlsEnsemble tls;
        std::optional<GaussianNoiseSpec> gaussian;
        double expected;
    };
    std::vector<Row> rows;
    rows.push_back({"TLS n0=5", symmetric_ladder(4, 0.2, 0.75, 5.0), {}, 1.283});
    rows.push_back({"TLS n0=7", symmetric_ladder(4, 0.2, 0.75, 7.0), {}, 1.696});
    rows.push_back({"EC tau=20", {}, ExpCorrelated{6.51, 20.0}, 0.605});
    rows.push_back({"EC tau=100", {}, ExpCorrelated{32.11, 100.0}, 1.120});
    rows.push_back({"1/f 1e-3", {}, OneOverF{0.04087, 1e-3}, 0.956});
    rows.push_back({"1/f 1e-5", {}, OneOverF{0.02574, 1e-5}, 1.378});

    Result r;
    int n_fail = 0;
    double worst_binom = 0.0;
    for (const auto& row : rows) {
        SimulationConfig sim;
        sim.protocol = prot;
        sim.N = 100000;
        sim.R = 1000; // 10^4 blocks of M = 10^4
        sim.seed = 51;
        double r1_th;
        std::vector<double> r2_th(size_t(M - 1));
        if (row.gaussian) {
            sim.gaussian = row.gaussian;
            const auto f = correlators_from_spectrum(*row.gaussian, prot, M - 1);
            r1_th = r1_gauss(f.at(0), prot);
            for (long k = 1; k < M; ++k)
                r2_th[size_t(k - 1)] = r2_gauss_centered(f, prot, k);
        } else {
            sim.tls = row.tls;
            sim.use_exact_tls_sampler = true;
            r1_th = r1_tls(row.tls, prot);
            for (long k = 1; k < M; ++k)
                r2_th[size_t(k - 1)] = r2_tls_centered(row.tls, prot, k);
        }
        const auto hist = block_histogram(run_experiment(sim), M);
        const double simul = std::sqrt(M * hist.variance_m_over_M());
        const double predicted =
            std::sqrt(M * variance_predicted(M, r1_th, r2_th));
        const double rel = std::abs(simul - row.expected) / row.expected;
        const bool ok = rel <= 0.10;
        if (!ok) ++n_fail;
        worst_binom = std::max(
            worst_binom,
            std::abs(std::sqrt(r1_th * (1.0 - r1_th)) - 0.379) / 0.379);
        r.detail.push_back(
            fmt("%-10s measured %.3f expected %.3f (|rel| %.0f%%) "
                "[independent closed-form route %.3f]%s",
                row.label, simul, row.expected, 100.0 * rel, predicted,
                ok ? "" : "  <-- outside 10%"));
    }
    const bool binom_ok = worst_binom <= 0.01;
    r.pass = n_fail == 0 && binom_ok;
    r.headline = fmt("%d of 6 sqrt(M)*sigma values within 10%% at M = 10^4, "
                     "10^4 blocks; binomial 0.379 rel err %.4f (bound 0.01)",
                     6 - n_fail, worst_binom);
    if (n_fail > 0)
        r.detail.push_back(
            "note: the TLS and 1/f 1e-3 measurements agree with the "
            "independent closed-form route to a few percent; for 1/f 1e-5 "
            "the sampler window (400 lags) truncates correlations beyond "
            "the window, so the simulation additionally falls below the "
            "closed form. Every route lies far outside 10% of the failing "
            "reference values, which scanning suggests correspond to an "
            "effective block length near M ~ 200, not the stated 10^4 "
            "(see README, known discrepancies)");
    return r;
}

// ---------------------------------------------------------------- criterion 6

// smoothing + prominence helpers for histogram peak counting
std::vector<double> smooth3(const std::vector<double>& p) {
    std::vector<double> s(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        double acc = p[i];
        int n = 1;
        if (i > 0) { acc += p[i - 1]; ++n; }
        if (i + 1 < p.size()) { acc += p[i + 1]; ++n; }
        s[i] = acc / n;
    }
    return s;
}

std::vector<long> prominent_maxima(const std::vector<double>& p,
                                   double prominence) {
    std::vector<long> out;
    const long n = static_cast<long>(p.size());
    for (long i = 1; i + 1 < n; ++i) {
        if (!(p[size_t(i)] >= p[size_t(i - 1)] && p[size_t(i)] > p[size_t(i + 1)]))
            continue;
        double left = p[size_t(i)], right = p[size_t(i)];
        bool has_left = false, has_right = false;
        for (long j = i - 1; j >= 0; --j) {
            left = std::min(left, p[size_t(j)]);
            if (p[size_t(j)] > p[size_t(i)]) { has_left = true; break; }
        }
        for (long j = i + 1; j < n; ++j) {
            right = std::min(right, p[size_t(j)]);
            if (p[size_t(j)] > p[size_t(i)]) { has_right = true; break; }
        }
        double prom = p[size_t(i)];
        if (has_left && has_right)
            prom = p[size_t(i)] - std::max(left, right);
        else if (has_left)
            prom = p[size_t(i)] - left;
        else if (has_right)
            prom = p[size_t(i)] - right;
        if (prom >= prominence) out.push_back(i);
    }
    return out;
}

Result c6_static_limit() {
    const RamseyProtocol prot;
    const long M = 100;
    Result r;

    // four frozen symmetric TLSs: W small enough that no flip occurs over a
    // repetition (W N t_cyc ~ 1e-3)
    TlsEnsemble frozen;
    for (int i = 0; i < 4; ++i) frozen.tls.push_back({0.2, 5e-9, 5e-9});
    SimulationConfig sim;
    sim.protocol = prot;
    sim.tls = frozen;
    sim.use_exact_tls_sampler = true;
    sim.N = 30000;
    sim.R = 600; // the frozen mixture is sampled once per repetition
    sim.seed = 61;
    const auto hist = block_histogram(run_experiment(sim), M);
    const auto stat = rho_static_tls(M, frozen, prot);
    const double tv_tls = total_variation(hist, stat);

    // expected binomial maxima at m = round(M p(theta_sl))
    std::vector<long> expect;
    for (int j = 0; j <= 4; ++j)
        expect.push_back(std::lround(
            M * ramsey_probability(0.2 * (2.0 * j - 4.0), prot)));
    std::sort(expect.begin(), expect.end()); // {49, 69, 85, 96, 100}

    const auto interior = prominent_maxima(smooth3(hist.probs), 2e-3);
    bool peaks_ok = interior.size() == 4;
    for (size_t i = 0; i < interior.size() && peaks_ok; ++i)
        peaks_ok = std::abs(interior[i] - expect[i]) <= 1;
    // the m = M spike is checked on the raw histogram since smoothing
    // dilutes single-bin edge peaks
    const bool edge_ok = expect[4] == M &&
                         hist.probs[size_t(M)] > 1.5 * hist.probs[size_t(M - 1)];

    // frozen Gaussian noise at f0 = 0.16: one phase draw per repetition
    const double f0 = 0.16;
    std::vector<OutcomeSeries> frozen_gauss;
    for (int rep = 0; rep < 1500; ++rep) {
        Stream st = Stream::root(62).sub(uint64_t(rep));
        const double theta = std::sqrt(f0) * st.next_normal();
        PhaseSequence seq;
        seq.theta.assign(10000, theta);
        frozen_gauss.push_back(sample_outcomes(seq, prot, st.sub(1)));
    }
    const auto hist_g = block_histogram(frozen_gauss, M);
    const auto stat_g = rho_static_gauss(M, f0, prot);
    const double tv_gauss = total_variation(hist_g, stat_g);
    // rho_static_gauss at f0 = 0.16 rises monotonically into the m = M
    // boundary: a single maximum means no interior peak plus the edge max
    const auto interior_g = prominent_maxima(smooth3(hist_g.probs), 2e-3);
    const bool single_max = interior_g.empty() &&
                            hist_g.probs[size_t(M)] > hist_g.probs[size_t(M - 1)];

    r.pass = tv_tls <= 0.05 && peaks_ok && edge_ok && tv_gauss <= 0.05 &&
             single_max;
    r.headline = fmt("frozen TLS TV %.3f (bound 0.05), %zu+1 maxima at "
                     "{49,69,85,96,100} +- 1; frozen Gaussian TV %.3f, "
                     "single max: %s",
                     tv_tls, interior.size(), tv_gauss,
                     single_max ? "yes" : "no");
    std::string peaks = "      interior maxima:";
    for (long m : interior) peaks += fmt(" %ld", m);
    r.detail.push_back(peaks + fmt("; edge spike ratio %.2f",
                                   hist.probs[size_t(M)] /
                                       hist.probs[size_t(M - 1)]));
    return r;
}

// ---------------------------------------------------------------- criterion 7

Result c7_gaussianity() {
    const RamseyProtocol prot;
    const ExpCorrelated spec{6.51, 20.0};
    const auto f_th = correlators_from_spectrum(spec, prot, 4);

    int n_within = 0;
    for (int s = 0; s < 100; ++s) {
        SimulationConfig sim;
        sim.protocol = prot;
        sim.gaussian = spec;
        sim.N = 30000;
        sim.R = 30;
        sim.seed = 7100 + uint64_t(s);
        const auto est = estimate_correlators(run_experiment(sim), 1, {{1, 4}});
        const double z = gaussianity_score(est.r3[0].value, est.r3[0].std_error,
                                           f_th, prot, 1, 4);
        if (std::abs(z) <= 3.0) ++n_within;
    }

    // single strong TLS: the Gaussian reconstruction from measured r1, r2
    // must be contradicted by the measured three-point function
    SimulationConfig sim_t;
    sim_t.protocol = prot;
    sim_t.tls.tls.push_back({0.75, 0.0005, 0.0005});
    sim_t.seed = 71;
    const auto est_t =
        estimate_correlators(run_experiment(sim_t), 4, {{1, 4}});
    std::vector<double> r2_meas;
    for (const auto& e : est_t.r2) r2_meas.push_back(e.value);
    const auto f_inf = infer_f_from_measurements(est_t.r1.value, r2_meas, prot);
    const double z_tls = gaussianity_score(
        est_t.r3[0].value, est_t.r3[0].std_error, f_inf, prot, 1, 4);

    // sign test on the asymmetric ladder
    SimulationConfig sim_a;
    sim_a.protocol = prot;
    for (int n = 1; n <= 5; ++n)
        sim_a.tls.tls.push_back({0.2, std::exp(-0.75 * (n + 1)) / 2.0,
                                 std::exp(-0.75 * n) / 2.0});
    sim_a.seed = 72;
    std::vector<std::pair<long, long>> lags;
    for (long k = 1; k <= 60; ++k) lags.emplace_back(k, k + 3);
    const auto est_a = estimate_correlators(run_experiment(sim_a), 60, lags);
    bool sign_fires = false;
    if (std::cos(prot.phi_R) > 0.0)
        for (size_t i = 0; i < est_a.r2.size(); ++i)
            if (est_a.r2[i].value > 3.0 * est_a.r2[i].std_error &&
                est_a.r3[i].value > 3.0 * est_a.r3[i].std_error)
                sign_fires = true;

    Result r;
    r.pass = n_within >= 99 && std::abs(z_tls) > 5.0 && sign_fires;
    r.headline =
        fmt("|z| <= 3 for %d/100 Gaussian seeds (need >= 99); strong TLS "
            "|z| = %.1f (need > 5); sign test fires: %s",
            n_within, std::abs(z_tls), sign_fires ? "yes" : "no");
    return r;
}

// ---------------------------------------------------------------- criterion 8

struct PeakScan {
    long peak_bin = 0;
    bool mirror_ok = false;
    double energy = 0.0;   // floor-subtracted sum over +-8 bins
    double height = 0.0;   // floor-subtracted max over +-8 bins
};

PeakScan scan_peaks(long N, double sigma_cyc, std::uint64_t seed) {
    const RamseyProtocol prot;
    SimulationConfig sim;
    sim.protocol = prot;
    sim.modulation = Modulation{0.1, 2.0 * kPi * 0.0173 / prot.t_cyc};
    sim.sigma_cyc = sigma_cyc;
    sim.N = N;
    sim.R = 300;
    sim.seed = seed;
    const auto spec = outcome_power_spectrum(run_experiment(sim));

    PeakScan p;
    p.peak_bin = 1;
    for (long m = 1; m <= N / 2; ++m)
        if (spec.R[size_t(m)] > spec.R[size_t(p.peak_bin)]) p.peak_bin = m;
    p.mirror_ok = std::abs(spec.R[size_t(N - p.peak_bin)] -
                           spec.R[size_t(p.peak_bin)]) <=
                  1e-9 * spec.R[size_t(p.peak_bin)];
    double floor = 0.0;
    long n_floor = 0;
    for (long m = N / 4; m <= N / 2; ++m, ++n_floor)
        floor += spec.R[size_t(m)];
    floor /= double(n_floor);
    for (long m = p.peak_bin - 8; m <= p.peak_bin + 8; ++m) {
        const double v = spec.R[size_t(m)] - floor;
        p.energy += v;
        p.height = std::max(p.height, v);
    }
    return p;
}

Result c8_modulation_scaling() {
    const RamseyProtocol prot;
    const double omega_p = 2.0 * kPi * 0.0173 / prot.t_cyc;
    const double sigma_j = 1.4; // N Delta_cyc = 10.5 at N = 2^13
    const double d_cyc = omega_p * omega_p * sigma_j * sigma_j / 2.0;

    const auto s13 = scan_peaks(8192, 0.0, 81);
    const auto s14 = scan_peaks(16384, 0.0, 82);
    const auto j13 = scan_peaks(8192, sigma_j, 83);
    const auto j14 = scan_peaks(16384, sigma_j, 84);

    const bool bins_ok = s13.peak_bin == std::lround(8192 * 0.0173) &&
                         s14.peak_bin == std::lround(16384 * 0.0173) &&
                         s13.mirror_ok && s14.mirror_ok;
    const double ratio0 = s14.energy / s13.energy;
    const double ratioj = j14.height / j13.height;
    const bool r0_ok = ratio0 >= 3.2 && ratio0 <= 4.8;
    const bool rj_ok = ratioj >= 1.6 && ratioj <= 2.4;

    Result r;
    r.pass = bins_ok && r0_ok && rj_ok;
    r.headline = fmt("peak bins %ld/%ld (expected 142/283, mirrors match); "
                     "energy ratio %.2f in [3.2, 4.8]; jittered height ratio "
                     "%.2f in [1.6, 2.4]",
                     s13.peak_bin, s14.peak_bin, ratio0, ratioj);
    r.detail.push_back(fmt(
        "sigma_cyc = %.1f gives N Delta_cyc = %.1f / %.1f (precondition >= 5); "
        "sharp peaks use the +-8 bin energy since the line is narrower than "
        "a bin, jittered peaks the bin maximum since it is broader",
        sigma_j, 8192 * d_cyc, 16384 * d_cyc));
    return r;
}

// ---------------------------------------------------------------- criterion 9

Result c9_invariants() {
    const RamseyProtocol prot;
    Result r;
    std::vector<std::string> fails;

    { // determinism: bit-identical outcome series and estimates
        SimulationConfig sim;
        sim.protocol = prot;
        sim.gaussian = ExpCorrelated{6.51, 20.0};
        sim.N = 2000;
        sim.R = 4;
        sim.seed = 91;
        const auto a = run_experiment(sim);
        const auto b = run_experiment(sim);
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i) same = a[i].x == b[i].x;
        const auto ea = estimate_correlators(a, 10, {{1, 4}});
        const auto eb = estimate_correlators(b, 10, {{1, 4}});
        same = same && ea.r1.value == eb.r1.value &&
               ea.r1.std_error == eb.r1.std_error;
        for (size_t i = 0; same && i < ea.r2.size(); ++i)
            same = ea.r2[i].value == eb.r2[i].value;
        const auto sa = outcome_power_spectrum(a);
        const auto sb = outcome_power_spectrum(b);
        same = same && sa.R == sb.R;
        if (!same) fails.push_back("determinism");

        // Parseval per repetition: sum_m R(m) = N sum_n x_n (binary input)
        double worst = 0.0;
        for (const auto& series : a) {
            const auto sp = outcome_power_spectrum({series});
            long double lhs = 0.0L, ones = 0.0L;
            for (double v : sp.R) lhs += v;
            for (auto x : series.x) ones += x;
            worst = std::max(
                worst, std::abs(double(lhs - double(sim.N) * ones)) /
                           double(double(sim.N) * ones));
        }
        if (worst > 1e-9) fails.push_back(fmt("parseval (%.1e)", worst));
        r.detail.push_back(fmt("parseval max rel err %.2e (bound 1e-9)", worst));
    }

    { // distribution normalization
        double worst = 0.0;
        const auto norm_err = [](const OutcomeDistribution& d) {
            long double s = 0.0L;
            for (double p : d.probs) s += p;
            return std::abs(double(s - 1.0L));
        };
        worst = std::max(worst, norm_err(rho_binomial(100, 0.37)));
        worst = std::max(
            worst, norm_err(rho_static_tls(
                       100, symmetric_ladder(4, 0.2, 0.75, 5.0), prot)));
        worst = std::max(worst, norm_err(rho_static_gauss(100, 0.16, prot)));
        if (worst > 1e-10) fails.push_back(fmt("normalization (%.1e)", worst));
        r.detail.push_back(
            fmt("distribution normalization max err %.2e (bound 1e-10)", worst));
    }

    { // det T(alpha, t) = e^{-W t}
        Stream st = Stream::root(92);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const TlsParams tls{st.next_double() * 2.0 - 1.0,
                                0.01 + st.next_double(),
                                0.01 + st.next_double()};
            for (const double t : {0.3, 1.7, 9.1})
                for (const double a : {-tls.V, 0.0, tls.V})
                    worst = std::max(
                        worst, std::abs(transfer_matrix(tls, a, t).det() -
                                        std::exp(-tls.W() * t)));
        }
        if (worst > 1e-12) fails.push_back(fmt("det T (%.1e)", worst));
        r.detail.push_back(fmt("max |det T - e^(-Wt)| = %.2e (bound 1e-12)",
                               worst));
    }

    { // f0 >= |f_k| for every spectrum family
        bool ok = true;
        const std::vector<GaussianNoiseSpec> specs = {
            White{0.3}, ExpCorrelated{6.51, 20.0}, OneOverF{0.02574, 1e-5},
            Colored{0.1, 0.05, 0.005, true}};
        for (const auto& spec : specs) {
            const auto f = correlators_from_spectrum(spec, prot, 200);
            for (long k = 1; k <= 200; ++k)
                if (std::abs(f.at(k)) > f.at(0)) ok = false;
        }
        if (!ok) fails.push_back("f0 >= |f_k|");
        r.detail.push_back(fmt("f0 >= |f_k| up to k = 200 for 4 spectrum "
                               "families: %s", ok ? "holds" : "VIOLATED"));
    }

    { // dt halving moves r1 by less than one combined standard error
        SimulationConfig sim;
        sim.protocol = prot;
        sim.tls = symmetric_ladder(5, 0.2, 0.75, 0.0);
        sim.N = 40000;
        sim.R = 30;
        sim.seed = 93;
        sim.dt = 0.1;
        const auto ea = estimate_correlators(run_experiment(sim), 1);
        sim.dt = 0.05;
        const auto eb = estimate_correlators(run_experiment(sim), 1);
        const double d = std::abs(ea.r1.value - eb.r1.value);
        const double se = std::hypot(ea.r1.std_error, eb.r1.std_error);
        if (d > se) fails.push_back(fmt("dt halving (%.1e > %.1e)", d, se));
        r.detail.push_back(
            fmt("dt halving: |r1(0.1) - r1(0.05)| = %.2e, combined stderr "
                "%.2e", d, se));
    }

    r.pass = fails.empty();
    std::string what = "determinism, parseval, normalization, det T, "
                       "f0 bound, dt halving";
    if (!fails.empty()) {
        what = "failed:";
        for (const auto& f : fails) what += " " + f;
    }
    r.headline = what;
    return r;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        Result (*fn)();
    };
    const Entry entries[] = {
        {"C1 dual-route TLS correlators", c1_dual_route},
        {"C2 ten-TLS ladder reproduction", c2_tls_ladder},
        {"C3 Gaussian working point", c3_gaussian_working_point},
        {"C4 1/f closed forms", c4_one_over_f_forms},
        {"C5 block broadening table", c5_table_broadening},
        {"C6 static-limit distributions", c6_static_limit},
        {"C7 Gaussianity discrimination", c7_gaussianity},
        {"C8 modulation peak scaling", c8_modulation_scaling},
        {"C9 invariant suite", c9_invariants},
    };
    int failures = 0;
    for (const auto& e : entries) {
        const Result res = e.fn();
        std::printf("%-34s %s  %s\n", e.name, res.pass ? "PASS" : "FAIL",
                    res.headline.c_str());
        for (const auto& d : res.detail) std::printf("      %s\n", d.c_str());
        std::fflush(stdout);
        if (!res.pass) ++failures;
    }
    std::printf("%d of 9 criteria pass\n", 9 - failures);
    return failures;
}
