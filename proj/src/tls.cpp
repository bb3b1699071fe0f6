#include "ramsey/tls.hpp"

#include <cmath>
#include <string>

#include "ramsey/errors.hpp"

namespace ramsey {

double TlsParams::w_factor() const {
    const double Wtot = W();
    if (Wtot == 0.0) return 1.0;
    return 2.0 * std::sqrt(W01 * W10) / Wtot;
}

double TlsParams::mean_tau_z() const {
    const double Wtot = W();
    if (Wtot == 0.0) return 0.0;
    return dW() / Wtot;
}

void TlsParams::validate() const {
    if (!(W01 >= 0.0) || !(W10 >= 0.0))
        throw config_error("tls: switching rates must be >= 0");
    if (!std::isfinite(V)) throw config_error("tls: V must be finite");
    // W = 0 is the frozen limit; it is symmetric by construction (dW = 0), so
    // the |dW| <= W invariant holds for every constructible parameter set.
}

TlsStationary tls_stationary(const TlsParams& tls) {
    tls.validate();
    const double W = tls.W();
    if (W == 0.0)
        throw config_error("tls_stationary: degenerate rates W01 + W10 = 0");
    return {tls.W10 / W, tls.W01 / W, tls.dW() / W};
}

void TlsEnsemble::validate() const {
    for (const auto& t : tls) t.validate();
}

double mean_frequency_shift(const TlsEnsemble& ensemble) {
    double shift = 0.0;
    for (const auto& t : ensemble.tls) shift += t.V * t.mean_tau_z();
    return shift;
}

TlsEnsemble symmetric_ladder(int n_tls, double V, double alpha, double n0,
                             double t_R) {
    if (n_tls < 0) throw config_error("symmetric_ladder: n_tls must be >= 0");
    TlsEnsemble ens;
    ens.tls.reserve(static_cast<std::size_t>(n_tls));
    for (int n = 1; n <= n_tls; ++n) {
        const double W = std::exp(-alpha * (n + n0)) / t_R;
        ens.tls.push_back({V, 0.5 * W, 0.5 * W});
    }
    return ens;
}

} // namespace ramsey
