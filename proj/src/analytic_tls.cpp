#include "ramsey/analytic_tls.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "ramsey/errors.hpp"

namespace ramsey {

namespace {

// sinh(z)/z, series near zero
cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0);
    }
    return std::sinh(z) / z;
}

double safe_ratio_dw(const TlsParams& tls) {
    return tls.W() == 0.0 ? 0.0 : tls.dW() / tls.W();
}

} // namespace

cplx gamma_param(const TlsParams& tls) {
    const double W = tls.W();
    const double dW = tls.dW();
    const cplx arg = cplx(W * W, 0.0) +
                     4.0 * cplx(0.0, tls.V) * cplx(dW, tls.V);
    return 0.5 * std::sqrt(arg);
}

cplx xi_factor(const TlsParams& tls, double t_R) {
    const double W = tls.W();
    const cplx g = gamma_param(tls);
    const cplx S = t_R * sinhc(g * t_R); // sinh(g t_R)/g
    const cplx C = std::cosh(g * t_R);
    const cplx coef(0.5 * W, tls.V * safe_ratio_dw(tls));
    return (coef * S + C) * std::exp(-0.5 * W * t_R);
}

cplx xi_k_factor(const TlsParams& tls, const RamseyProtocol& protocol, long k) {
    const double W = tls.W();
    const cplx g = gamma_param(tls);
    const cplx S = protocol.t_R * sinhc(g * protocol.t_R);
    return cplx(0.0, tls.w_factor() * tls.V) * S *
           std::exp(-0.5 * static_cast<double>(k) * W * protocol.t_cyc);
}

double r1_tls(const TlsEnsemble& ensemble, const RamseyProtocol& protocol) {
    cplx prod(1.0, 0.0);
    for (const auto& t : ensemble.tls) prod *= xi_factor(t, protocol.t_R);
    const cplx phase = std::exp(cplx(0.0, protocol.phi_R));
    return 0.5 + 0.5 * std::exp(-protocol.t_R_over_T2) * (phase * prod).real();
}

double r2_tls_centered(const TlsEnsemble& ensemble,
                       const RamseyProtocol& protocol, long k, bool prune,
                       int n_cap) {
    if (k < 1) throw config_error("r2_tls_centered: lag k must be >= 1");
    const std::size_t n = ensemble.size();
    if (n > static_cast<std::size_t>(n_cap))
        throw resource_limit_error(
            "r2_tls_centered: ensemble exceeds the subset-enumeration cap; "
            "use the Monte-Carlo estimator instead");
    if (n == 0) return 0.0;

    std::vector<cplx> Xi(n), xik(n);
    for (std::size_t i = 0; i < n; ++i) {
        Xi[i] = xi_factor(ensemble.tls[i], protocol.t_R);
        xik[i] = xi_k_factor(ensemble.tls[i], protocol, k);
    }
    const cplx phase = std::exp(cplx(0.0, protocol.phi_R));

    // depth-first product over subsets; at least one xi_k member required
    double sum = 0.0;
    double running_max = 0.0;
    const double prune_eps = 1e-14;
    auto descend = [&](auto&& self, std::size_t i, cplx prod,
                       bool nonempty) -> void {
        if (prune && nonempty && std::abs(prod) < prune_eps * running_max)
            return;
        if (i == n) {
            if (!nonempty) return;
            const double re = (phase * prod).real();
            const double term = re * re;
            sum += term;
            if (term > running_max) running_max = term;
            return;
        }
        self(self, i + 1, prod * xik[i], true);
        self(self, i + 1, prod * Xi[i], nonempty);
    };
    descend(descend, 0, cplx(1.0, 0.0), false);

    return 0.25 * std::exp(-2.0 * protocol.t_R_over_T2) * sum;
}

namespace {

// variance of the phase accumulated during one measurement from TLS n,
// 2 (wV/W)^2 (W t_R + e^{-W t_R} - 1); limit (wV t_R)^2 / ... at W -> 0
double theta_sq_bar(const TlsParams& tls, double t_R) {
    const double W = tls.W();
    const double wv = tls.w_factor() * tls.V;
    const double x = W * t_R;
    if (x < 1e-6) {
        // W t_R + e^{-W t_R} - 1 = x^2/2 - x^3/6 + ...
        return wv * wv * t_R * t_R * (1.0 - x / 3.0);
    }
    return 2.0 * (wv / W) * (wv / W) * (x + std::exp(-x) - 1.0);
}

// <theta^_0 theta^_k> = (2Vw/W)^2 e^{-k W t_cyc} sinh^2(W t_R / 2), k >= 1
double theta_pair_correlator(const TlsParams& tls,
                             const RamseyProtocol& protocol, long k) {
    const double W = tls.W();
    const double wv = tls.w_factor() * tls.V;
    double sh; // 2 sinh(W t_R/2) / W
    if (W * protocol.t_R < 1e-6) {
        sh = protocol.t_R * (1.0 + W * W * protocol.t_R * protocol.t_R / 24.0);
    } else {
        sh = 2.0 * std::sinh(0.5 * W * protocol.t_R) / W;
    }
    return wv * wv * sh * sh *
           std::exp(-static_cast<double>(k) * W * protocol.t_cyc);
}

} // namespace

double approx_r1(const TlsEnsemble& ensemble, const RamseyProtocol& protocol,
                 R1Mode mode) {
    const double envT2 = std::exp(-protocol.t_R_over_T2);
    switch (mode) {
        case R1Mode::weak: {
            double var = 0.0;
            for (const auto& t : ensemble.tls)
                var += theta_sq_bar(t, protocol.t_R);
            return 0.5 + 0.5 * envT2 * std::exp(-0.5 * var) *
                             std::cos(protocol.phi_R);
        }
        case R1Mode::short_tr: {
            double var = 0.0;
            for (const auto& t : ensemble.tls) {
                const double x = t.w_factor() * t.V * protocol.t_R;
                var += x * x;
            }
            return 0.5 + 0.5 * envT2 * std::exp(-0.5 * var) *
                             std::cos(protocol.phi_R);
        }
        case R1Mode::strong: {
            cplx prod(1.0, 0.0);
            for (const auto& t : ensemble.tls) {
                const double vt = t.V * protocol.t_R;
                prod *= std::exp(-0.5 * t.W() * protocol.t_R) *
                        cplx(std::cos(vt), safe_ratio_dw(t) * std::sin(vt));
            }
            const cplx phase = std::exp(cplx(0.0, protocol.phi_R));
            return 0.5 + 0.5 * envT2 * (phase * prod).real();
        }
    }
    throw config_error("approx_r1: unknown mode");
}

double approx_r2(const TlsEnsemble& ensemble, const RamseyProtocol& protocol,
                 long k, R2Mode mode) {
    if (k < 1) throw config_error("approx_r2: lag k must be >= 1");
    const double env2 = std::exp(-2.0 * protocol.t_R_over_T2);
    switch (mode) {
        case R2Mode::weak: {
            double sum = 0.0;
            for (std::size_t n = 0; n < ensemble.size(); ++n) {
                const auto& t = ensemble.tls[n];
                double others = 0.0;
                for (std::size_t m = 0; m < ensemble.size(); ++m)
                    if (m != n)
                        others += theta_sq_bar(ensemble.tls[m], protocol.t_R);
                const double s = std::sin(protocol.phi_R -
                                          t.V * t.mean_tau_z() * protocol.t_R);
                sum += theta_pair_correlator(t, protocol, k) *
                       std::exp(-others) * s * s;
            }
            return 0.25 * env2 * sum;
        }
        case R2Mode::short_tr: {
            double sum = 0.0;
            for (std::size_t n = 0; n < ensemble.size(); ++n) {
                const auto& t = ensemble.tls[n];
                double others = 0.0;
                for (std::size_t m = 0; m < ensemble.size(); ++m) {
                    if (m == n) continue;
                    const auto& o = ensemble.tls[m];
                    const double x = o.w_factor() * o.V * protocol.t_R;
                    others += x * x;
                }
                const double s = std::sin(protocol.phi_R -
                                          t.V * t.mean_tau_z() * protocol.t_R);
                sum += t.V * t.V *
                       std::exp(-static_cast<double>(k) * t.W() *
                                protocol.t_cyc) *
                       std::exp(-others) * s * s;
            }
            return 0.25 * env2 * protocol.t_R * protocol.t_R * sum;
        }
        case R2Mode::strong_single: {
            if (ensemble.size() != 1)
                throw config_error(
                    "approx_r2: strong_single requires exactly one TLS");
            const auto& t = ensemble.tls[0];
            const double sphi = std::sin(protocol.phi_R);
            const double sv = std::sin(t.V * protocol.t_R);
            return 0.25 * env2 * sphi * sphi * sv * sv *
                   std::exp(-static_cast<double>(k) * t.W() * protocol.t_cyc);
        }
    }
    throw config_error("approx_r2: unknown mode");
}

TransferMatrix TransferMatrix::mul(const TransferMatrix& o) const {
    return {{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
             m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
}

std::array<cplx, 2> TransferMatrix::apply(const std::array<cplx, 2>& v) const {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

TransferMatrix transfer_matrix(const TlsParams& tls, double alpha_V,
                               double t) {
    const double W = tls.W();
    const double dW = tls.dW();
    const cplx g =
        0.5 * std::sqrt(cplx(W * W, 0.0) +
                        4.0 * cplx(0.0, alpha_V) * cplx(dW, alpha_V));
    const cplx S = t * sinhc(g * t); // sinh(g t)/g
    const cplx C = std::cosh(g * t);
    const double env = std::exp(-0.5 * W * t);
    return {{env * (0.5 * W * S + C), env * cplx(0.0, alpha_V) * S,
             env * (cplx(dW, alpha_V) * S), env * (C - 0.5 * W * S)}};
}

namespace {

std::array<cplx, 2> stationary_vector(const TlsParams& tls) {
    return {cplx(1.0, 0.0), cplx(safe_ratio_dw(tls), 0.0)};
}

} // namespace

cplx characteristic_one_time(const TlsEnsemble& ensemble, double t_R) {
    cplx prod(1.0, 0.0);
    for (const auto& t : ensemble.tls) {
        const auto v = transfer_matrix(t, t.V, t_R).apply(stationary_vector(t));
        prod *= v[0];
    }
    return prod;
}

cplx characteristic_two_time(const TlsEnsemble& ensemble,
                             const RamseyProtocol& protocol, long k,
                             int sign) {
    if (k < 1)
        throw config_error("characteristic_two_time: lag k must be >= 1");
    const double gap = static_cast<double>(k) * protocol.t_cyc - protocol.t_R;
    cplx prod(1.0, 0.0);
    for (const auto& t : ensemble.tls) {
        const auto first = transfer_matrix(t, sign >= 0 ? t.V : -t.V,
                                           protocol.t_R);
        const auto free = transfer_matrix(t, 0.0, gap);
        const auto second = transfer_matrix(t, t.V, protocol.t_R);
        const auto v =
            second.apply(free.apply(first.apply(stationary_vector(t))));
        prod *= v[0];
    }
    return prod;
}

double r2_via_characteristic(const TlsEnsemble& ensemble,
                             const RamseyProtocol& protocol, long k) {
    const cplx chi1 = characteristic_one_time(ensemble, protocol.t_R);
    const cplx chi_p = characteristic_two_time(ensemble, protocol, k, +1);
    const cplx chi_m = characteristic_two_time(ensemble, protocol, k, -1);
    const cplx e2 = std::exp(cplx(0.0, 2.0 * protocol.phi_R));
    const double val = (chi_m - chi1 * std::conj(chi1)).real() +
                       (e2 * (chi_p - chi1 * chi1)).real();
    return 0.125 * std::exp(-2.0 * protocol.t_R_over_T2) * val;
}

} // namespace ramsey
