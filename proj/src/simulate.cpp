#include "ramsey/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <iostream>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "ramsey/errors.hpp"

namespace ramsey {

namespace {

long steps_per(double t, double dt, const char* what) {
    const double ratio = t / dt;
    const auto n = static_cast<long>(std::llround(ratio));
    if (n < 1 || std::abs(n * dt - t) > 1e-9 * t)
        throw config_error(std::string("dt must divide ") + what);
    return n;
}

// +1/-1 from the stationary distribution; frozen TLSs split evenly.
int stationary_state(const TlsParams& tls, Stream& stream) {
    const double w_plus = tls.W() == 0.0 ? 0.5 : tls.W10 / tls.W();
    return stream.next_double() < w_plus ? 1 : -1;
}

double exponential_wait(double rate, Stream& stream) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(1.0 - stream.next_double()) / rate;
}

// largest automatic Gaussian window
constexpr long kCap = 2000;

} // namespace

void SimulationConfig::validate() const {
    protocol.validate();
    tls.validate();
    if (gaussian) validate_spec(*gaussian);
    if (N < 1) throw config_error("need at least one cycle");
    if (R < 1) throw config_error("need at least one repetition");
    const double dt_val = resolved_dt();
    if (!(dt_val > 0.0)) throw config_error("dt must be positive");
    if (dt_val > protocol.t_R / 5.0 + 1e-12 * protocol.t_R)
        throw config_error("dt must not exceed t_R/5");
    if (!tls.tls.empty() && !use_exact_tls_sampler) {
        (void)steps_per(protocol.t_R, dt_val, "t_R");
        (void)steps_per(protocol.t_cyc, dt_val, "t_cyc");
    }
    if (k_corr && *k_corr < 1) throw config_error("k_corr must be >= 1");
    if (sigma_cyc < 0.0) throw config_error("sigma_cyc must be >= 0");
    if (modulation && modulation->a_p != 0.0 && !(modulation->omega_p > 0.0))
        throw config_error("modulation frequency must be positive");
    if (!(step_budget > 0.0)) throw config_error("step budget must be positive");
    if (threads < 0) throw config_error("threads must be >= 0");
}

double SimulationConfig::resolved_dt() const {
    return dt ? *dt : 0.1 * protocol.t_R;
}

long SimulationConfig::resolved_k_corr() const {
    if (k_corr) return *k_corr;
    if (!gaussian) throw config_error("k_corr requested without Gaussian noise");
    struct Visitor {
        const SimulationConfig& cfg;
        long operator()(const White&) const { return 1; }
        long operator()(const ExpCorrelated&) const { return 10; }
        long operator()(const OneOverF&) const { return 400; }
        long operator()(const Colored& c) const {
            // f_k decays as exp(-k t_cyc omega sin(phi)); 8 decay times
            const double om = c.omega_clr;
            const double g = c.Gamma_clr;
            const double phi =
                0.5 * std::atan2(2.0 * g * std::sqrt(std::max(
                                           om * om - g * g, 0.0)),
                                 om * om - 2.0 * g * g);
            const double rate = cfg.protocol.t_cyc * om * std::sin(phi);
            if (!(rate > 0.0)) return kCap;
            return std::min<long>(
                kCap, static_cast<long>(std::ceil(8.0 / rate)));
        }
        long operator()(const Tabulated&) const {
            // no analytic correlation time; scan the correlators
            const auto f = correlators_from_spectrum(*cfg.gaussian,
                                                     cfg.protocol, 64);
            const double f0 = f.at(0);
            if (f0 <= 0.0) return 1;
            for (long k = 1; k <= 64; ++k)
                if (std::abs(f.at(k)) <= 1e-4 * f0) return k;
            auto ext = correlators_from_spectrum(*cfg.gaussian, cfg.protocol,
                                                 kCap);
            for (long k = 65; k <= kCap; ++k)
                if (std::abs(ext.at(k)) <= 1e-4 * f0) return k;
            return kCap;
        }
    };
    return std::max<long>(1, std::visit(Visitor{*this}, *gaussian));
}

double OutcomeSeries::mean() const {
    if (x.empty()) return 0.0;
    long sum = 0;
    for (auto v : x) sum += v;
    return static_cast<double>(sum) / static_cast<double>(x.size());
}

PhaseSequence sample_tls_phases(const TlsEnsemble& ensemble,
                                const SimulationConfig& config, Stream stream) {
    const auto& prot = config.protocol;
    const double dt = config.resolved_dt();
    const long spw = steps_per(prot.t_R, dt, "t_R");
    const long spc = steps_per(prot.t_cyc, dt, "t_cyc");
    const long N = config.N;

    PhaseSequence seq;
    seq.theta.assign(static_cast<size_t>(N), 0.0);

    for (size_t n = 0; n < ensemble.tls.size(); ++n) {
        const auto& tls = ensemble.tls[n];
        const double p01 = tls.W01 * dt;
        const double p10 = tls.W10 * dt;
        if (p01 > 0.5 || p10 > 0.5)
            throw config_error("telegraph step probability W dt above 0.5");
        if (p01 > 0.1 || p10 > 0.1)
            std::cerr << "warning: telegraph step probability W dt above 0.1; "
                         "discretization error grows\n";

        Stream s = stream.sub(n);
        int d = stationary_state(tls, s);
        const double v_dt = tls.V * dt;
        for (long k = 0; k < N; ++k) {
            double acc = 0.0;
            for (long m = 0; m < spw; ++m) {
                acc += d;
                const double p_flip = d > 0 ? p01 : p10;
                if (s.next_double() < p_flip) d = -d;
            }
            seq.theta[static_cast<size_t>(k)] += v_dt * acc;
            for (long m = spw; m < spc; ++m) {
                const double p_flip = d > 0 ? p01 : p10;
                if (s.next_double() < p_flip) d = -d;
            }
        }
    }
    return seq;
}

std::vector<double> sample_frequency_path(const TlsEnsemble& ensemble,
                                          const RamseyProtocol& protocol,
                                          double dt, long n_steps,
                                          Stream stream) {
    protocol.validate();
    ensemble.validate();
    if (!(dt > 0.0))
        throw config_error("frequency path requires dt > 0");
    if (n_steps < 1)
        throw config_error("frequency path requires n_steps >= 1");
    if (static_cast<double>(n_steps) *
            std::max<size_t>(ensemble.tls.size(), 1) >
        1e10)
        throw resource_limit_error("frequency path step budget exceeded");

    std::vector<double> path(static_cast<size_t>(n_steps), 0.0);
    for (size_t n = 0; n < ensemble.tls.size(); ++n) {
        const auto& tls = ensemble.tls[n];
        const double p01 = tls.W01 * dt;
        const double p10 = tls.W10 * dt;
        if (p01 > 0.5 || p10 > 0.5)
            throw config_error("telegraph step probability W dt above 0.5");
        if (p01 > 0.1 || p10 > 0.1)
            std::cerr << "warning: telegraph step probability W dt above 0.1; "
                         "discretization error grows\n";

        Stream s = stream.sub(n);
        int d = stationary_state(tls, s);
        const double v = tls.V * protocol.t_R;
        for (long m = 0; m < n_steps; ++m) {
            path[static_cast<size_t>(m)] += v * d;
            const double p_flip = d > 0 ? p01 : p10;
            if (s.next_double() < p_flip) d = -d;
        }
    }
    return path;
}

PhaseSequence sample_tls_phases_exact(const TlsEnsemble& ensemble,
                                      const RamseyProtocol& protocol, long N,
                                      Stream stream) {
    protocol.validate();
    ensemble.validate();
    if (N < 1) throw config_error("need at least one cycle");

    PhaseSequence seq;
    seq.theta.assign(static_cast<size_t>(N), 0.0);
    const double t_R = protocol.t_R;
    const double t_cyc = protocol.t_cyc;
    const double t_end = static_cast<double>(N - 1) * t_cyc + t_R;

    for (size_t n = 0; n < ensemble.tls.size(); ++n) {
        const auto& tls = ensemble.tls[n];
        Stream s = stream.sub(n);
        int d = stationary_state(tls, s);

        double t = 0.0;
        long k_lo = 0;
        while (t < t_end) {
            const double rate = d > 0 ? tls.W01 : tls.W10;
            const double t_next = std::min(t + exponential_wait(rate, s), t_end);
            // signed dwell time of this TLS state inside each Ramsey window
            while (k_lo < N && static_cast<double>(k_lo) * t_cyc + t_R <= t)
                ++k_lo;
            for (long k = k_lo; k < N; ++k) {
                const double w_start = static_cast<double>(k) * t_cyc;
                if (w_start >= t_next) break;
                const double overlap = std::min(t_next, w_start + t_R) -
                                       std::max(t, w_start);
                if (overlap > 0.0)
                    seq.theta[static_cast<size_t>(k)] += tls.V * d * overlap;
            }
            d = -d;
            t = t_next;
        }
    }
    return seq;
}

GaussianSamplerPlan GaussianSamplerPlan::build(const PhaseCorrelators& f,
                                               long k_corr) {
    if (k_corr < 1) throw config_error("k_corr must be >= 1");
    if (f.max_lag() < k_corr)
        throw config_error("phase correlators shorter than the window");

    GaussianSamplerPlan plan;
    plan.k_corr = k_corr;
    const long w = k_corr;
    const double f0 = f.at(0);
    if (f0 == 0.0) {
        // degenerate noise-free input: emit zeros
        plan.chol_head.assign(static_cast<size_t>(w) + 1,
                              std::vector<double>(static_cast<size_t>(w) + 1,
                                                  0.0));
        plan.ar_coeff.assign(static_cast<size_t>(w), 0.0);
        plan.innovation_std = 0.0;
        return plan;
    }

    Eigen::MatrixXd cov(w + 1, w + 1);
    for (long i = 0; i <= w; ++i)
        for (long j = 0; j <= w; ++j) cov(i, j) = f.at(std::abs(i - j));

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-12 * f0;
        llt.compute(cov);
        if (llt.info() != Eigen::Success)
            throw numerical_error(
                "windowed phase covariance is not positive definite");
    }
    const Eigen::MatrixXd l_full = llt.matrixL();

    plan.chol_head.assign(static_cast<size_t>(w) + 1, {});
    for (long i = 0; i <= w; ++i) {
        auto& row = plan.chol_head[static_cast<size_t>(i)];
        row.resize(static_cast<size_t>(i) + 1);
        for (long j = 0; j <= i; ++j) row[static_cast<size_t>(j)] = l_full(i, j);
    }
    plan.innovation_std = l_full(w, w);

    // conditional mean coefficients: solve C_head beta = cov(theta_w, rest)
    Eigen::VectorXd c(w);
    for (long i = 0; i < w; ++i) c(i) = f.at(w - i);
    const Eigen::MatrixXd l_head = l_full.topLeftCorner(w, w);
    Eigen::VectorXd beta =
        l_head.transpose().triangularView<Eigen::Upper>().solve(
            l_head.triangularView<Eigen::Lower>().solve(c));
    plan.ar_coeff.assign(beta.data(), beta.data() + w);
    return plan;
}

PhaseSequence sample_gaussian_phases(const GaussianSamplerPlan& plan, long N,
                                     Stream stream) {
    if (N < 1) throw config_error("need at least one cycle");
    const long w = plan.k_corr;
    PhaseSequence seq;
    seq.theta.assign(static_cast<size_t>(N), 0.0);

    // joint draw of the first w+1 phases through the Cholesky factor
    const long head = std::min<long>(N, w + 1);
    std::vector<double> z(static_cast<size_t>(head));
    for (auto& v : z) v = stream.next_normal();
    for (long i = 0; i < head; ++i) {
        double acc = 0.0;
        const auto& row = plan.chol_head[static_cast<size_t>(i)];
        for (long j = 0; j <= i; ++j)
            acc += row[static_cast<size_t>(j)] * z[static_cast<size_t>(j)];
        seq.theta[static_cast<size_t>(i)] = acc;
    }

    // stationary regime: fixed-window conditional draws
    for (long k = w + 1; k < N; ++k) {
        double mu = 0.0;
        for (long j = 0; j < w; ++j)
            mu += plan.ar_coeff[static_cast<size_t>(j)] *
                  seq.theta[static_cast<size_t>(k - w + j)];
        seq.theta[static_cast<size_t>(k)] =
            mu + plan.innovation_std * stream.next_normal();
    }
    return seq;
}

PhaseSequence sample_gaussian_phases(const PhaseCorrelators& f, long N,
                                     long k_corr, Stream stream) {
    return sample_gaussian_phases(GaussianSamplerPlan::build(f, k_corr), N,
                                  stream);
}

PhaseSequence inject_modulation(const PhaseSequence& theta, double a_p,
                                double omega_p, const RamseyProtocol& protocol,
                                double phase_p, double sigma_cyc,
                                Stream stream) {
    PhaseSequence out = theta;
    if (a_p == 0.0) return out;
    if (!(omega_p > 0.0))
        throw config_error("modulation frequency must be positive");
    if (sigma_cyc < 0.0) throw config_error("sigma_cyc must be >= 0");

    const double amp = 2.0 * a_p / omega_p * std::sin(omega_p * protocol.t_R / 2.0);
    const double phase = phase_p + omega_p * protocol.t_R / 2.0;
    double t_k = 0.0;
    for (size_t k = 0; k < out.theta.size(); ++k) {
        out.theta[k] += amp * std::cos(omega_p * t_k + phase);
        t_k += protocol.t_cyc +
               (sigma_cyc > 0.0 ? sigma_cyc * stream.next_normal() : 0.0);
    }
    return out;
}

OutcomeSeries sample_outcomes(const PhaseSequence& theta,
                              const RamseyProtocol& protocol, Stream stream) {
    OutcomeSeries out;
    out.x.resize(theta.theta.size());
    for (size_t k = 0; k < theta.theta.size(); ++k) {
        const double p = ramsey_probability(theta.theta[k], protocol);
        out.x[k] = p > stream.next_double() ? 1 : 0;
    }
    return out;
}

namespace {

// stream tags within one repetition
constexpr std::uint64_t kTagGaussian = 0;
constexpr std::uint64_t kTagOutcome = 1;
constexpr std::uint64_t kTagModulation = 2;
constexpr std::uint64_t kTagTls = 3;

PhaseSequence phases_for_rep(const SimulationConfig& config,
                             const GaussianSamplerPlan* plan, int rep) {
    const Stream rep_stream = Stream::root(config.seed).sub(
        static_cast<std::uint64_t>(rep));

    PhaseSequence seq;
    if (!config.tls.tls.empty()) {
        seq = config.use_exact_tls_sampler
                  ? sample_tls_phases_exact(config.tls, config.protocol,
                                            config.N, rep_stream.sub(kTagTls))
                  : sample_tls_phases(config.tls, config,
                                      rep_stream.sub(kTagTls));
    } else {
        seq.theta.assign(static_cast<size_t>(config.N), 0.0);
    }

    if (plan) {
        const auto gauss = sample_gaussian_phases(*plan, config.N,
                                                  rep_stream.sub(kTagGaussian));
        for (size_t k = 0; k < seq.theta.size(); ++k)
            seq.theta[k] += gauss.theta[k];
    }

    if (config.modulation && config.modulation->a_p != 0.0) {
        Stream mod_stream = rep_stream.sub(kTagModulation);
        const double phi_p = 2.0 * kPi * mod_stream.next_double();
        seq = inject_modulation(seq, config.modulation->a_p,
                                config.modulation->omega_p, config.protocol,
                                phi_p, config.sigma_cyc, mod_stream);
    }
    return seq;
}

void check_step_budget(const SimulationConfig& config) {
    const bool grid = !config.tls.tls.empty() && !config.use_exact_tls_sampler;
    const double per_cycle =
        grid ? config.protocol.t_cyc / config.resolved_dt() : 1.0;
    const double steps = static_cast<double>(config.N) *
                         static_cast<double>(config.R) * per_cycle;
    if (steps > config.step_budget)
        throw resource_limit_error("simulation step budget exceeded");
}

} // namespace

PhaseSequence simulate_phases(const SimulationConfig& config, int rep) {
    config.validate();
    if (rep < 0 || rep >= config.R) throw config_error("repetition out of range");
    GaussianSamplerPlan plan;
    const GaussianSamplerPlan* plan_ptr = nullptr;
    if (config.gaussian) {
        const long k_corr = config.resolved_k_corr();
        plan = GaussianSamplerPlan::build(
            correlators_from_spectrum(*config.gaussian, config.protocol, k_corr),
            k_corr);
        plan_ptr = &plan;
    }
    return phases_for_rep(config, plan_ptr, rep);
}

std::vector<OutcomeSeries> run_experiment(const SimulationConfig& config) {
    config.validate();
    check_step_budget(config);

    GaussianSamplerPlan plan;
    const GaussianSamplerPlan* plan_ptr = nullptr;
    if (config.gaussian) {
        const long k_corr = config.resolved_k_corr();
        plan = GaussianSamplerPlan::build(
            correlators_from_spectrum(*config.gaussian, config.protocol, k_corr),
            k_corr);
        plan_ptr = &plan;
    }

    std::vector<OutcomeSeries> results(static_cast<size_t>(config.R));
    std::atomic<int> next_rep{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            const int rep = next_rep.fetch_add(1);
            if (rep >= config.R) break;
            try {
                const auto phases = phases_for_rep(config, plan_ptr, rep);
                const Stream rep_stream = Stream::root(config.seed).sub(
                    static_cast<std::uint64_t>(rep));
                results[static_cast<size_t>(rep)] = sample_outcomes(
                    phases, config.protocol, rep_stream.sub(kTagOutcome));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };

    int n_threads = config.threads > 0
                        ? config.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, config.R);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

} // namespace ramsey
