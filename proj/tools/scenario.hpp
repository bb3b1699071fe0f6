#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ramsey/noise_spectra.hpp"
#include "ramsey/protocol.hpp"
#include "ramsey/simulate.hpp"
#include "ramsey/tls.hpp"

namespace ramsey::cli {

using Json = nlohmann::ordered_json;

struct RunBlock {
    long N = 100000;
    int R = 30;
    std::optional<double> dt;
    std::optional<long> k_corr;
    double sigma_cyc = 0.0;
    std::uint64_t seed = 0;
    int threads = 0;
    bool exact_tls = false;
};

struct AnalysisBlock {
    long k_max = 60;
    long triple_offset = 3;
    long M = 100;
    double tolerance_sigma = 3.0;
    std::optional<double> tv_max;
};

struct OutputsBlock {
    std::string dir = ".";
    std::string basename; // defaults to the scenario name
    bool csv = true;
    bool json = true;
};

// One experiment description: a noise block tagged by kind ("tls", "white",
// "exp_correlated", "colored", "one_over_f", "tabulated", "none"), optional
// coherent modulation, and run/analysis/output settings. Unknown keys are
// rejected everywhere and all embedded physical invariants are enforced at
// parse time.
struct ScenarioConfig {
    std::string scenario; // analytic simulate compare distribution spectrum
    RamseyProtocol protocol;
    std::string noise_kind = "none";
    TlsEnsemble tls;                           // kind "tls"
    std::optional<GaussianNoiseSpec> gaussian; // Gaussian kinds
    std::optional<Modulation> modulation;
    RunBlock run;
    AnalysisBlock analysis;
    OutputsBlock outputs;
};

// fallback_scenario fills a missing "scenario" key (the CLI passes the
// subcommand name); a present key that contradicts a nonempty fallback is an
// error.
ScenarioConfig parse_scenario(const Json& j,
                              const std::string& fallback_scenario = "");
ScenarioConfig parse_scenario_file(const std::string& path,
                                   const std::string& fallback_scenario = "");

// Canonical form: every resolved field, fixed key order, ladder shorthands
// expanded. parse(serialize(parse(x))) == parse(x).
Json serialize_scenario(const ScenarioConfig& cfg);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<long> cycles;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::string tolerance_profile = "desk"; // desk | paper
};

void apply_overrides(ScenarioConfig& cfg, const CliOverrides& o);

// Executes the scenario and writes its artifact files (CSV tables and a
// machine-readable JSON summary). Returns the paths written.
std::vector<std::string> run_scenario(const ScenarioConfig& cfg);

// Named dataset generators with parameters fixed to the study configurations
// (targets: fig2a fig2b fig2c fig2d fig3 fig4 fig5 fig6 fig7-spectrum
// tableD1 psC1). Desk scale N=1e5, R=30; the "paper" profile raises R to 300.
std::vector<std::string> run_reproduce(const std::string& target,
                                       const CliOverrides& o);

} // namespace ramsey::cli
