#pragma once

#include <string>
#include <variant>
#include <vector>

namespace ramsey {

struct White {
    double D_w = 0.0;
};

struct ExpCorrelated {
    double D_corr = 0.0;
    double tau_corr = 1.0;
};

struct Colored {
    double D_clr = 0.0;
    double omega_clr = 1.0;
    double Gamma_clr = 0.1;
    // closed-form correlators are only valid for sqrt(2)*Gamma < omega_clr
    // and omega_clr*t_R well below 1; set to use them outside that window
    bool waive_regime_check = false;
};

struct OneOverF {
    double D_fl = 0.0;
    double omega_min = 1e-5;
};

// samples of S_q on an ascending grid of non-negative frequencies;
// evaluated at |omega| by linear interpolation, zero beyond the grid
struct Tabulated {
    std::vector<double> omega;
    std::vector<double> S;
};

using GaussianNoiseSpec =
    std::variant<White, ExpCorrelated, Colored, OneOverF, Tabulated>;

void validate_spec(const GaussianNoiseSpec& spec);

double spectral_density(const GaussianNoiseSpec& spec, double omega);

std::string spec_name(const GaussianNoiseSpec& spec);

} // namespace ramsey
