#include "ramsey/analytic_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ramsey/errors.hpp"
#include "ramsey/quadrature.hpp"
#include "ramsey/special_functions.hpp"

namespace ramsey {

double PhaseCorrelators::at(long k) const {
    if (k < 0 || k > max_lag())
        throw config_error("PhaseCorrelators: lag outside stored range");
    return f[static_cast<std::size_t>(k)];
}

void PhaseCorrelators::validate() const {
    if (f.empty() || !(f[0] > 0.0))
        throw config_error("PhaseCorrelators: f0 must be positive");
    for (std::size_t k = 1; k < f.size(); ++k)
        if (std::abs(f[k]) > f[0] * (1.0 + 1e-12))
            throw config_error("PhaseCorrelators: |f_k| exceeds f0");
}

namespace {

double ec_correlator(const ExpCorrelated& s, const RamseyProtocol& p, long k) {
    const double x = p.t_R / s.tau_corr;
    if (k == 0) return s.D_corr * (p.t_R - s.tau_corr * (-std::expm1(-x)));
    const double y = static_cast<double>(k) * p.t_cyc / s.tau_corr;
    if (x > 30.0) {
        const double d = -std::expm1(-x); // 1 - e^{-x}
        return s.D_corr * s.tau_corr * 0.25 * std::exp(x - y) * d * d;
    }
    const double sh = std::sinh(0.5 * x);
    return s.D_corr * s.tau_corr * 2.0 * sh * sh * std::exp(-y);
}

double colored_correlator(const Colored& s, const RamseyProtocol& p, long k) {
    const double wt = s.omega_clr * p.t_R;
    const bool in_regime =
        std::sqrt(2.0) * s.Gamma_clr < s.omega_clr && wt < 0.3;
    if (!in_regime && !s.waive_regime_check)
        throw config_error(
            "Colored: closed form outside its validity window "
            "(needs sqrt(2)*Gamma_clr < omega_clr and omega_clr*t_R << 1); "
            "use quadrature or set waive_regime_check");
    const double w2 = s.omega_clr * s.omega_clr;
    const double g2 = s.Gamma_clr * s.Gamma_clr;
    const double phi =
        0.5 * std::atan2(2.0 * s.Gamma_clr * std::sqrt(w2 - g2), w2 - 2.0 * g2);
    const double w3 = w2 * s.omega_clr;
    if (k == 0)
        return s.D_clr * p.t_R * p.t_R / (4.0 * w3 * std::sin(phi));
    const double kt = static_cast<double>(k) * p.t_cyc * s.omega_clr;
    return s.D_clr * p.t_R * p.t_R / (2.0 * w3 * std::sin(2.0 * phi)) *
           std::exp(-kt * std::sin(phi)) * std::cos(kt * std::cos(phi) - phi);
}

// series for [-1 + (1-b)e^{-b}]/b^2 + 2/b = 3/2 - 2b/3 + 5b^2/24 - ...
long double f0_rational_part(long double b) {
    if (b < 0.5L) {
        long double sum = 0.0L, bpow = 1.0L, fact = 1.0L;
        for (int n = 2; n < 60; ++n) {
            fact *= n; // n!
            const long double add =
                (n % 2 == 0 ? 1.0L : -1.0L) * bpow * (n + 1) / fact;
            sum += add;
            bpow *= b;
            if (std::abs(add) < 1e-22L * std::abs(sum)) break;
        }
        return sum;
    }
    return -1.0L / (b * b) + 2.0L / b -
           (b - 1.0L) * std::exp(-b) / (b * b);
}

double one_over_f_correlator(const OneOverF& s, const RamseyProtocol& p,
                             long k) {
    const long double b = static_cast<long double>(s.omega_min) * p.t_R;
    const long double tr2 = static_cast<long double>(p.t_R) * p.t_R;
    if (k == 0) {
        const long double val =
            f0_rational_part(b) + detail::sinh_integral_ld(b) -
            detail::cosh_integral_ld(b);
        return static_cast<double>(0.5L * s.D_fl * tr2 * val);
    }
    const long double a =
        static_cast<long double>(k) * p.t_cyc / p.t_R;
    const long double sh_half = std::sinh(0.5L * b);
    const long double bracket =
        (1.0L - a * b) * 2.0L * sh_half * sh_half + b * std::sinh(b);
    const long double term1 = 2.0L * std::exp(-a * b) * bracket / (b * b);
    const long double term2 =
        2.0L * a * a * detail::expint_ei_ld(-a * b) -
        (a + 1.0L) * (a + 1.0L) * detail::expint_ei_ld(-(a + 1.0L) * b) -
        (a - 1.0L) * (a - 1.0L) * detail::expint_ei_ld(-(a - 1.0L) * b);
    return static_cast<double>(0.25L * s.D_fl * tr2 * (term1 + term2));
}

} // namespace

double phase_correlator(const GaussianNoiseSpec& spec,
                        const RamseyProtocol& protocol, long k) {
    if (k < 0) throw config_error("phase_correlator: lag must be >= 0");
    validate_spec(spec);
    protocol.validate();
    struct Eval {
        const RamseyProtocol& p;
        long k;
        double operator()(const White& s) const {
            return k == 0 ? s.D_w * p.t_R : 0.0;
        }
        double operator()(const ExpCorrelated& s) const {
            return ec_correlator(s, p, k);
        }
        double operator()(const Colored& s) const {
            return colored_correlator(s, p, k);
        }
        double operator()(const OneOverF& s) const {
            return one_over_f_correlator(s, p, k);
        }
        double operator()(const Tabulated& s) const {
            return phase_correlator_quadrature(
                [&s](double w) { return spectral_density(s, w); }, p, k);
        }
    };
    return std::visit(Eval{protocol, k}, spec);
}

PhaseCorrelators correlators_from_spectrum(const GaussianNoiseSpec& spec,
                                           const RamseyProtocol& protocol,
                                           long max_lag) {
    if (max_lag < 0)
        throw config_error("correlators_from_spectrum: max_lag must be >= 0");
    PhaseCorrelators out;
    out.f.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (long k = 0; k <= max_lag; ++k)
        out.f.push_back(phase_correlator(spec, protocol, k));
    return out;
}

namespace {

// J(c) = Int_0^inf S(w) (1 - cos(c w)) / w^2 dw, split into an adaptive head
// up to a cosine zero past the fixed cut, a smooth mapped tail, and an
// accelerated alternating oscillatory tail.
QuadratureResult j_integral(const std::function<double(double)>& S, double c,
                            double t_R) {
    auto integrand = [&S, c](double w) {
        if (w == 0.0) return S(0.0) * 0.5 * c * c;
        // 1 - cos(c w) = 2 sin^2(c w / 2), free of cancellation
        const double s = std::sin(0.5 * c * w);
        return S(w) * 2.0 * s * s / (w * w);
    };
    const double cut0 = 32.0 / t_R;
    const long n_zero =
        static_cast<long>(std::ceil((cut0 * c - kPi / 2.0) / kPi));
    const double cut = (kPi / 2.0 + static_cast<double>(n_zero) * kPi) / c;

    auto head = integrate_adaptive(integrand, 0.0, cut, 0.0, 1e-13, 60000);

    auto mapped = [&S](double u) { return S(1.0 / u); };
    auto smooth_tail =
        integrate_adaptive(mapped, 0.0, 1.0 / cut,
                           1e-16 * (std::abs(head.value) + 1.0), 1e-13, 4000);

    auto osc = [&S, c](double w) { return S(w) * std::cos(c * w) / (w * w); };
    const double osc_tol =
        std::max(1e-14 * (std::abs(head.value) + std::abs(smooth_tail.value)),
                 1e-30);
    auto osc_tail = sum_alternating_tail(osc, cut, kPi / c, osc_tol);

    return {head.value + smooth_tail.value - osc_tail.value,
            head.error + smooth_tail.error + osc_tail.error,
            head.converged && smooth_tail.converged && osc_tail.converged};
}

} // namespace

double phase_correlator_quadrature(const std::function<double(double)>& S_q,
                                   const RamseyProtocol& protocol, long k,
                                   const QuadratureOptions& options) {
    if (k < 0)
        throw config_error("phase_correlator_quadrature: lag must be >= 0");
    protocol.validate();
    double value, error;
    bool converged;
    if (k == 0) {
        auto j = j_integral(S_q, protocol.t_R, protocol.t_R);
        value = j.value;
        error = j.error;
        converged = j.converged;
    } else {
        const double a = static_cast<double>(k) * protocol.t_cyc;
        auto jp = j_integral(S_q, a + protocol.t_R, protocol.t_R);
        auto jm = j_integral(S_q, a - protocol.t_R, protocol.t_R);
        auto j0 = j_integral(S_q, a, protocol.t_R);
        value = 0.5 * jp.value + 0.5 * jm.value - j0.value;
        error = 0.5 * jp.error + 0.5 * jm.error + j0.error;
        converged = jp.converged && jm.converged && j0.converged;
    }
    value *= 2.0 / kPi;
    error *= 2.0 / kPi;
    const double goal =
        std::max(options.abs_tol, options.rel_tol * std::abs(value));
    (void)converged;
    if (error > goal) {
        std::ostringstream msg;
        msg << "phase_correlator_quadrature: requested tolerance not reached "
            << "(achieved " << error << " for f_" << k << " = " << value
            << ")";
        throw numerical_error(msg.str());
    }
    return value;
}

double one_over_f_correlator_quadrature(const OneOverF& spec,
                                        const RamseyProtocol& protocol,
                                        long k) {
    if (k < 0)
        throw config_error(
            "one_over_f_correlator_quadrature: lag must be >= 0");
    validate_spec(GaussianNoiseSpec{spec});
    const double t_R = protocol.t_R;
    if (k == 0) {
        auto integrand = [t_R](double W) {
            const double x = t_R * W;
            return (x + std::expm1(-x)) / (W * W * W);
        };
        const double cut = 60.0 / t_R;
        auto head = integrate_adaptive(integrand, spec.omega_min, cut, 0.0,
                                       1e-13, 60000);
        if (!head.converged)
            throw numerical_error(
                "one_over_f_correlator_quadrature: f0 integral did not "
                "converge");
        // analytic tail of (t_R W - 1)/W^3; the e^{-W t_R} piece is below
        // 1e-25 at the cut
        const double tail = t_R / cut - 0.5 / (cut * cut);
        return spec.D_fl * (head.value + tail);
    }
    const double decay = static_cast<double>(k) * protocol.t_cyc - t_R;
    auto integrand = [t_R, decay](double W) {
        const double sh = std::sinh(0.5 * t_R * W);
        return 2.0 * sh * sh * std::exp(-decay * W) * std::exp(-t_R * W) /
               (W * W * W);
    };
    const double cut = spec.omega_min + 70.0 / decay;
    auto r = integrate_adaptive(integrand, spec.omega_min, cut, 0.0, 1e-13,
                                60000);
    if (!r.converged)
        throw numerical_error(
            "one_over_f_correlator_quadrature: f_k integral did not converge");
    return spec.D_fl * r.value;
}

double log_approx_f_k(const OneOverF& spec, const RamseyProtocol& protocol,
                      long k) {
    if (k < 1) throw config_error("log_approx_f_k: lag must be >= 1");
    const double x = static_cast<double>(k) * spec.omega_min * protocol.t_cyc;
    return 0.5 * spec.D_fl * protocol.t_R * protocol.t_R *
           (-kEulerGamma - std::log(x));
}

double one_over_f_large_k_asymptote(const OneOverF& spec,
                                    const RamseyProtocol& protocol, long k) {
    if (k < 1)
        throw config_error("one_over_f_large_k_asymptote: lag must be >= 1");
    const double x = static_cast<double>(k) * spec.omega_min * protocol.t_cyc;
    return 0.5 * spec.D_fl * protocol.t_R * protocol.t_R * std::exp(-x) / x;
}

double r1_gauss(double f0, const RamseyProtocol& protocol) {
    if (!(f0 >= 0.0)) throw config_error("r1_gauss: f0 must be >= 0");
    return 0.5 * (1.0 + std::exp(-protocol.t_R_over_T2) *
                            std::exp(-0.5 * f0) * std::cos(protocol.phi_R));
}

double r2_gauss_centered(double f0, double f_k,
                         const RamseyProtocol& protocol) {
    const double c2 = std::cos(2.0 * protocol.phi_R);
    return 0.125 * std::exp(-2.0 * protocol.t_R_over_T2) * std::exp(-f0) *
           (std::expm1(f_k) + c2 * std::expm1(-f_k));
}

double r2_gauss_centered(const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k) {
    if (k < 1) throw config_error("r2_gauss_centered: lag must be >= 1");
    return r2_gauss_centered(f.at(0), f.at(k), protocol);
}

double r3_gauss_centered(double f0, double f_k, double f_l, double f_lk,
                         const RamseyProtocol& protocol) {
    const double fsum = f_k + f_l + f_lk;
    const double c1 = std::cos(protocol.phi_R);
    const double c3 = std::cos(3.0 * protocol.phi_R);
    const double odd = std::exp(-fsum) + 2.0 - std::exp(-f_k) -
                       std::exp(-f_l) - std::exp(-f_lk);
    const double even = std::exp(fsum - 2.0 * f_k) +
                        std::exp(fsum - 2.0 * f_l) +
                        std::exp(fsum - 2.0 * f_lk) + 6.0 -
                        2.0 * (std::exp(f_k) + std::exp(f_l) + std::exp(f_lk)) -
                        (std::exp(-f_k) + std::exp(-f_l) + std::exp(-f_lk));
    return std::exp(-1.5 * f0 - 3.0 * protocol.t_R_over_T2) / 32.0 *
           (c3 * odd + c1 * even);
}

double r3_gauss_centered(const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k, long l) {
    if (!(1 <= k && k < l))
        throw config_error("r3_gauss_centered: requires 1 <= k < l");
    return r3_gauss_centered(f.at(0), f.at(k), f.at(l), f.at(l - k), protocol);
}

PhaseCorrelators infer_f_from_measurements(double r1_meas,
                                           const std::vector<double>& r2_meas,
                                           const RamseyProtocol& protocol) {
    const double cphi = std::cos(protocol.phi_R);
    if (cphi == 0.0)
        throw numerical_error(
            "infer_f_from_measurements: cos(phi_R)=0 carries no f0 signal");
    const double c1 =
        (2.0 * r1_meas - 1.0) * std::exp(protocol.t_R_over_T2) / cphi;
    if (!(c1 > 0.0) || c1 > 1.0 + 1e-9)
        throw numerical_error(
            "infer_f_from_measurements: r1 outside the invertible range "
            "(2r1-1)e^{t_R/T2}/cos(phi_R) in (0, 1]");
    const double f0 = c1 >= 1.0 ? 0.0 : -2.0 * std::log(c1);

    PhaseCorrelators out;
    out.f.push_back(f0);
    const double c2 = std::cos(2.0 * protocol.phi_R);
    const double env = std::exp(-2.0 * protocol.t_R_over_T2) * std::exp(-f0);
    for (std::size_t i = 0; i < r2_meas.size(); ++i) {
        const double target = r2_meas[i];
        if (std::abs(c2) < 1e-12) {
            const double arg = 8.0 * target / env;
            if (arg <= -1.0)
                throw numerical_error(
                    "infer_f_from_measurements: r2 value below the invertible "
                    "range at lag " + std::to_string(i + 1));
            out.f.push_back(std::log1p(arg));
            continue;
        }
        auto forward = [&](double x) {
            return 0.125 * env * (std::expm1(x) + c2 * std::expm1(-x));
        };
        // increasing branch: x >= 0.5 ln(c2) when c2 > 0, all x otherwise
        double lo = c2 > 0.0 ? 0.5 * std::log(c2) : -(f0 + 50.0);
        double hi = f0 + 5.0;
        while (forward(hi) < target && hi < f0 + 700.0) hi += 50.0;
        if (forward(lo) > target || forward(hi) < target)
            throw numerical_error(
                "infer_f_from_measurements: r2 value not attainable on the "
                "invertible branch at lag " + std::to_string(i + 1));
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (forward(mid) < target ? lo : hi) = mid;
        }
        out.f.push_back(0.5 * (lo + hi));
    }
    return out;
}

double gaussianity_score(double r3_meas, double r3_stderr,
                         const PhaseCorrelators& f,
                         const RamseyProtocol& protocol, long k, long l) {
    if (!(r3_stderr > 0.0))
        throw config_error("gaussianity_score: stderr must be positive");
    return (r3_meas - r3_gauss_centered(f, protocol, k, l)) / r3_stderr;
}

double tls_spectrum_theory(const TlsEnsemble& ensemble, double omega) {
    double sum = 0.0;
    for (const auto& t : ensemble.tls) {
        const double W = t.W();
        if (W == 0.0) continue;
        const double wv = t.w_factor() * t.V;
        sum += 2.0 * wv * wv * W / (W * W + omega * omega);
    }
    return sum;
}

} // namespace ramsey
