#include "ramsey/noise_spectra.hpp"

#include <algorithm>
#include <cmath>

#include "ramsey/errors.hpp"
#include "ramsey/protocol.hpp"

namespace ramsey {

namespace {

struct Validator {
    void operator()(const White& s) const {
        if (!(s.D_w >= 0.0)) throw config_error("White: D_w must be >= 0");
    }
    void operator()(const ExpCorrelated& s) const {
        if (!(s.D_corr >= 0.0))
            throw config_error("ExpCorrelated: D_corr must be >= 0");
        if (!(s.tau_corr > 0.0))
            throw config_error("ExpCorrelated: tau_corr must be > 0");
    }
    void operator()(const Colored& s) const {
        if (!(s.D_clr >= 0.0))
            throw config_error("Colored: D_clr must be >= 0");
        if (!(s.Gamma_clr > 0.0) || !(s.omega_clr > s.Gamma_clr))
            throw config_error(
                "Colored: requires omega_clr > Gamma_clr > 0");
    }
    void operator()(const OneOverF& s) const {
        if (!(s.D_fl >= 0.0))
            throw config_error("OneOverF: D_fl must be >= 0");
        if (!(s.omega_min > 0.0))
            throw config_error("OneOverF: omega_min must be > 0");
    }
    void operator()(const Tabulated& s) const {
        if (s.omega.size() != s.S.size() || s.omega.size() < 2)
            throw config_error(
                "Tabulated: needs matching omega/S arrays of length >= 2");
        for (std::size_t i = 0; i < s.omega.size(); ++i) {
            if (!(s.omega[i] >= 0.0))
                throw config_error("Tabulated: grid frequencies must be >= 0");
            if (i > 0 && !(s.omega[i] > s.omega[i - 1]))
                throw config_error("Tabulated: grid must be ascending");
            if (!(s.S[i] >= 0.0))
                throw config_error("Tabulated: spectrum must be >= 0");
        }
    }
};

struct Density {
    double w;
    double operator()(const White& s) const { return s.D_w; }
    double operator()(const ExpCorrelated& s) const {
        const double x = w * s.tau_corr;
        return s.D_corr / (1.0 + x * x);
    }
    double operator()(const Colored& s) const {
        const double a = w * w - s.omega_clr * s.omega_clr;
        const double b = 2.0 * s.Gamma_clr * w;
        return s.D_clr / (a * a + b * b);
    }
    double operator()(const OneOverF& s) const {
        // (pi/2) D/w [1 - (2/pi) atan(w_min/w)] = D atan(w/w_min)/w,
        // finite limit D/w_min at w = 0
        if (w == 0.0) return s.D_fl / s.omega_min;
        return s.D_fl * std::atan(w / s.omega_min) / w;
    }
    double operator()(const Tabulated& s) const {
        if (w < s.omega.front() || w > s.omega.back()) return 0.0;
        if (w == s.omega.back()) return s.S.back();
        if (w == s.omega.front()) return s.S.front();
        auto it = std::upper_bound(s.omega.begin(), s.omega.end(), w);
        const std::size_t hi = static_cast<std::size_t>(it - s.omega.begin());
        const std::size_t lo = hi - 1;
        const double t = (w - s.omega[lo]) / (s.omega[hi] - s.omega[lo]);
        return s.S[lo] + t * (s.S[hi] - s.S[lo]);
    }
};

} // namespace

void validate_spec(const GaussianNoiseSpec& spec) {
    std::visit(Validator{}, spec);
}

double spectral_density(const GaussianNoiseSpec& spec, double omega) {
    return std::visit(Density{std::abs(omega)}, spec);
}

std::string spec_name(const GaussianNoiseSpec& spec) {
    struct Name {
        std::string operator()(const White&) const { return "white"; }
        std::string operator()(const ExpCorrelated&) const {
            return "exp_correlated";
        }
        std::string operator()(const Colored&) const { return "colored"; }
        std::string operator()(const OneOverF&) const { return "one_over_f"; }
        std::string operator()(const Tabulated&) const { return "tabulated"; }
    };
    return std::visit(Name{}, spec);
}

} // namespace ramsey
