#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "csv.hpp"
#include "ramsey/acquisition.hpp"
#include "ramsey/analytic_gaussian.hpp"
#include "ramsey/analytic_tls.hpp"
#include "ramsey/errors.hpp"
#include "ramsey/estimate.hpp"

namespace ramsey::cli {

namespace {

const std::set<std::string> kScenarios = {"analytic", "simulate", "compare",
                                          "distribution", "spectrum"};

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
    if (!j.is_object())
        throw config_error(ctx + ": expected a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw config_error(ctx + ": unknown key \"" + item.key() + "\"");
}

double get_num(const Json& j, const std::string& key, const std::string& ctx) {
    const auto& v = j.at(key);
    if (!v.is_number())
        throw config_error(ctx + "." + key + ": expected a number");
    return v.get<double>();
}

double get_num_or(const Json& j, const std::string& key, double dflt,
                  const std::string& ctx) {
    return j.contains(key) ? get_num(j, key, ctx) : dflt;
}

long get_int(const Json& j, const std::string& key, const std::string& ctx) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw config_error(ctx + "." + key + ": expected an integer");
    return v.get<long>();
}

long get_int_or(const Json& j, const std::string& key, long dflt,
                const std::string& ctx) {
    return j.contains(key) ? get_int(j, key, ctx) : dflt;
}

bool get_bool_or(const Json& j, const std::string& key, bool dflt,
                 const std::string& ctx) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_boolean())
        throw config_error(ctx + "." + key + ": expected a boolean");
    return v.get<bool>();
}

std::string get_str(const Json& j, const std::string& key,
                    const std::string& ctx) {
    const auto& v = j.at(key);
    if (!v.is_string())
        throw config_error(ctx + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> get_num_array(const Json& j, const std::string& key,
                                  const std::string& ctx) {
    const auto& v = j.at(key);
    if (!v.is_array())
        throw config_error(ctx + "." + key + ": expected an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw config_error(ctx + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void require(const Json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key))
        throw config_error(ctx + ": missing required key \"" + key + "\"");
}

void parse_noise(const Json& j, ScenarioConfig& cfg) {
    require(j, "kind", "noise");
    const std::string kind = get_str(j, "kind", "noise");
    cfg.noise_kind = kind;
    if (kind == "none") {
        check_keys(j, {"kind"}, "noise");
    } else if (kind == "tls") {
        check_keys(j, {"kind", "tls", "ladder"}, "noise");
        if (j.contains("tls") == j.contains("ladder"))
            throw config_error(
                "noise: kind \"tls\" takes exactly one of \"tls\", \"ladder\"");
        if (j.contains("tls")) {
            const auto& arr = j.at("tls");
            if (!arr.is_array() || arr.empty())
                throw config_error("noise.tls: expected a non-empty array");
            for (const auto& e : arr) {
                check_keys(e, {"V", "W01", "W10"}, "noise.tls[]");
                require(e, "V", "noise.tls[]");
                require(e, "W01", "noise.tls[]");
                require(e, "W10", "noise.tls[]");
                cfg.tls.tls.push_back({get_num(e, "V", "noise.tls[]"),
                                       get_num(e, "W01", "noise.tls[]"),
                                       get_num(e, "W10", "noise.tls[]")});
            }
        } else {
            const auto& lad = j.at("ladder");
            check_keys(lad, {"count", "V", "alpha", "n0"}, "noise.ladder");
            require(lad, "count", "noise.ladder");
            require(lad, "V", "noise.ladder");
            cfg.tls = symmetric_ladder(
                static_cast<int>(get_int(lad, "count", "noise.ladder")),
                get_num(lad, "V", "noise.ladder"),
                get_num_or(lad, "alpha", 0.75, "noise.ladder"),
                get_num_or(lad, "n0", 0.0, "noise.ladder"));
        }
        cfg.tls.validate();
    } else if (kind == "white") {
        check_keys(j, {"kind", "D_w"}, "noise");
        require(j, "D_w", "noise");
        cfg.gaussian = White{get_num(j, "D_w", "noise")};
    } else if (kind == "exp_correlated") {
        check_keys(j, {"kind", "D_corr", "tau_corr"}, "noise");
        require(j, "D_corr", "noise");
        require(j, "tau_corr", "noise");
        cfg.gaussian = ExpCorrelated{get_num(j, "D_corr", "noise"),
                                     get_num(j, "tau_corr", "noise")};
    } else if (kind == "colored") {
        check_keys(j,
                   {"kind", "D_clr", "omega_clr", "Gamma_clr",
                    "waive_regime_check"},
                   "noise");
        require(j, "D_clr", "noise");
        require(j, "omega_clr", "noise");
        require(j, "Gamma_clr", "noise");
        cfg.gaussian =
            Colored{get_num(j, "D_clr", "noise"),
                    get_num(j, "omega_clr", "noise"),
                    get_num(j, "Gamma_clr", "noise"),
                    get_bool_or(j, "waive_regime_check", false, "noise")};
    } else if (kind == "one_over_f") {
        check_keys(j, {"kind", "D_fl", "omega_min"}, "noise");
        require(j, "D_fl", "noise");
        require(j, "omega_min", "noise");
        cfg.gaussian = OneOverF{get_num(j, "D_fl", "noise"),
                                get_num(j, "omega_min", "noise")};
    } else if (kind == "tabulated") {
        check_keys(j, {"kind", "omega", "S"}, "noise");
        require(j, "omega", "noise");
        require(j, "S", "noise");
        cfg.gaussian = Tabulated{get_num_array(j, "omega", "noise"),
                                 get_num_array(j, "S", "noise")};
    } else {
        throw config_error("noise.kind: unknown kind \"" + kind + "\"");
    }
    if (cfg.gaussian) validate_spec(*cfg.gaussian);
}

Json serialize_noise(const ScenarioConfig& cfg) {
    Json n;
    n["kind"] = cfg.noise_kind;
    if (cfg.noise_kind == "tls") {
        Json arr = Json::array();
        for (const auto& t : cfg.tls.tls) {
            Json e;
            e["V"] = t.V;
            e["W01"] = t.W01;
            e["W10"] = t.W10;
            arr.push_back(std::move(e));
        }
        n["tls"] = std::move(arr);
    } else if (cfg.noise_kind == "white") {
        n["D_w"] = std::get<White>(*cfg.gaussian).D_w;
    } else if (cfg.noise_kind == "exp_correlated") {
        const auto& s = std::get<ExpCorrelated>(*cfg.gaussian);
        n["D_corr"] = s.D_corr;
        n["tau_corr"] = s.tau_corr;
    } else if (cfg.noise_kind == "colored") {
        const auto& s = std::get<Colored>(*cfg.gaussian);
        n["D_clr"] = s.D_clr;
        n["omega_clr"] = s.omega_clr;
        n["Gamma_clr"] = s.Gamma_clr;
        n["waive_regime_check"] = s.waive_regime_check;
    } else if (cfg.noise_kind == "one_over_f") {
        const auto& s = std::get<OneOverF>(*cfg.gaussian);
        n["D_fl"] = s.D_fl;
        n["omega_min"] = s.omega_min;
    } else if (cfg.noise_kind == "tabulated") {
        const auto& s = std::get<Tabulated>(*cfg.gaussian);
        n["omega"] = s.omega;
        n["S"] = s.S;
    }
    return n;
}

} // namespace

ScenarioConfig parse_scenario(const Json& j,
                              const std::string& fallback_scenario) {
    ScenarioConfig cfg;
    check_keys(j,
               {"scenario", "protocol", "noise", "modulation", "run",
                "analysis", "outputs"},
               "config");

    if (j.contains("scenario")) {
        cfg.scenario = get_str(j, "scenario", "config");
        if (!fallback_scenario.empty() && cfg.scenario != fallback_scenario)
            throw config_error("config.scenario \"" + cfg.scenario +
                               "\" does not match the requested scenario \"" +
                               fallback_scenario + "\"");
    } else if (!fallback_scenario.empty()) {
        cfg.scenario = fallback_scenario;
    } else {
        throw config_error("config: missing required key \"scenario\"");
    }
    if (!kScenarios.count(cfg.scenario))
        throw config_error("config.scenario: unknown scenario \"" +
                           cfg.scenario + "\"");

    if (j.contains("protocol")) {
        const auto& p = j.at("protocol");
        check_keys(p, {"t_R", "t_cyc", "phi_R", "t_R_over_T2"}, "protocol");
        cfg.protocol.t_R = get_num_or(p, "t_R", 1.0, "protocol");
        cfg.protocol.t_cyc = get_num_or(p, "t_cyc", 3.0, "protocol");
        cfg.protocol.phi_R = get_num_or(p, "phi_R", kPi / 4.0, "protocol");
        cfg.protocol.t_R_over_T2 =
            get_num_or(p, "t_R_over_T2", 0.0, "protocol");
    }
    cfg.protocol.validate();

    require(j, "noise", "config");
    parse_noise(j.at("noise"), cfg);

    if (j.contains("modulation")) {
        const auto& m = j.at("modulation");
        check_keys(m, {"a_p", "omega_p"}, "modulation");
        require(m, "a_p", "modulation");
        require(m, "omega_p", "modulation");
        Modulation mod{get_num(m, "a_p", "modulation"),
                       get_num(m, "omega_p", "modulation")};
        if (!(mod.omega_p > 0.0))
            throw config_error("modulation.omega_p must be positive");
        cfg.modulation = mod;
    }

    if (j.contains("run")) {
        const auto& r = j.at("run");
        check_keys(r,
                   {"N", "R", "dt", "k_corr", "sigma_cyc", "seed", "threads",
                    "exact_tls"},
                   "run");
        cfg.run.N = get_int_or(r, "N", cfg.run.N, "run");
        cfg.run.R = static_cast<int>(get_int_or(r, "R", cfg.run.R, "run"));
        if (r.contains("dt")) cfg.run.dt = get_num(r, "dt", "run");
        if (r.contains("k_corr")) cfg.run.k_corr = get_int(r, "k_corr", "run");
        cfg.run.sigma_cyc = get_num_or(r, "sigma_cyc", 0.0, "run");
        if (r.contains("seed")) {
            const auto& v = r.at("seed");
            if (!v.is_number_integer() && !v.is_number_unsigned())
                throw config_error("run.seed: expected an integer");
            cfg.run.seed = v.get<std::uint64_t>();
        }
        cfg.run.threads =
            static_cast<int>(get_int_or(r, "threads", 0, "run"));
        cfg.run.exact_tls = get_bool_or(r, "exact_tls", false, "run");
    }
    if (cfg.run.N < 1) throw config_error("run.N must be at least 1");
    if (cfg.run.R < 1) throw config_error("run.R must be at least 1");
    if (cfg.run.dt && !(*cfg.run.dt > 0.0))
        throw config_error("run.dt must be positive");
    if (cfg.run.k_corr && *cfg.run.k_corr < 1)
        throw config_error("run.k_corr must be at least 1");
    if (cfg.run.sigma_cyc < 0.0)
        throw config_error("run.sigma_cyc must be non-negative");
    if (cfg.run.threads < 0)
        throw config_error("run.threads must be non-negative");

    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        check_keys(a,
                   {"k_max", "triple_offset", "M", "tolerance_sigma",
                    "tv_max"},
                   "analysis");
        cfg.analysis.k_max = get_int_or(a, "k_max", 60, "analysis");
        cfg.analysis.triple_offset =
            get_int_or(a, "triple_offset", 3, "analysis");
        cfg.analysis.M = get_int_or(a, "M", 100, "analysis");
        cfg.analysis.tolerance_sigma =
            get_num_or(a, "tolerance_sigma", 3.0, "analysis");
        if (a.contains("tv_max"))
            cfg.analysis.tv_max = get_num(a, "tv_max", "analysis");
    }
    if (cfg.analysis.k_max < 0)
        throw config_error("analysis.k_max must be non-negative");
    if (cfg.analysis.triple_offset < 1)
        throw config_error("analysis.triple_offset must be at least 1");
    if (cfg.analysis.M < 1) throw config_error("analysis.M must be at least 1");
    if (!(cfg.analysis.tolerance_sigma > 0.0))
        throw config_error("analysis.tolerance_sigma must be positive");
    if (cfg.analysis.tv_max && !(*cfg.analysis.tv_max > 0.0))
        throw config_error("analysis.tv_max must be positive");

    cfg.outputs.basename = cfg.scenario;
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        check_keys(o, {"dir", "basename", "formats"}, "outputs");
        if (o.contains("dir")) cfg.outputs.dir = get_str(o, "dir", "outputs");
        if (o.contains("basename"))
            cfg.outputs.basename = get_str(o, "basename", "outputs");
        if (o.contains("formats")) {
            const auto& f = o.at("formats");
            if (!f.is_array())
                throw config_error("outputs.formats: expected an array");
            cfg.outputs.csv = false;
            cfg.outputs.json = false;
            for (const auto& e : f) {
                if (!e.is_string())
                    throw config_error("outputs.formats: expected strings");
                const std::string s = e.get<std::string>();
                if (s == "csv")
                    cfg.outputs.csv = true;
                else if (s == "json")
                    cfg.outputs.json = true;
                else
                    throw config_error("outputs.formats: unknown format \"" +
                                       s + "\"");
            }
        }
    }
    if (cfg.outputs.basename.empty())
        throw config_error("outputs.basename must not be empty");
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path,
                                   const std::string& fallback_scenario) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }
    return parse_scenario(j, fallback_scenario);
}

Json serialize_scenario(const ScenarioConfig& cfg) {
    Json j;
    j["scenario"] = cfg.scenario;
    Json p;
    p["t_R"] = cfg.protocol.t_R;
    p["t_cyc"] = cfg.protocol.t_cyc;
    p["phi_R"] = cfg.protocol.phi_R;
    p["t_R_over_T2"] = cfg.protocol.t_R_over_T2;
    j["protocol"] = std::move(p);
    j["noise"] = serialize_noise(cfg);
    if (cfg.modulation) {
        Json m;
        m["a_p"] = cfg.modulation->a_p;
        m["omega_p"] = cfg.modulation->omega_p;
        j["modulation"] = std::move(m);
    }
    Json r;
    r["N"] = cfg.run.N;
    r["R"] = cfg.run.R;
    if (cfg.run.dt) r["dt"] = *cfg.run.dt;
    if (cfg.run.k_corr) r["k_corr"] = *cfg.run.k_corr;
    r["sigma_cyc"] = cfg.run.sigma_cyc;
    r["seed"] = cfg.run.seed;
    r["threads"] = cfg.run.threads;
    r["exact_tls"] = cfg.run.exact_tls;
    j["run"] = std::move(r);
    Json a;
    a["k_max"] = cfg.analysis.k_max;
    a["triple_offset"] = cfg.analysis.triple_offset;
    a["M"] = cfg.analysis.M;
    a["tolerance_sigma"] = cfg.analysis.tolerance_sigma;
    if (cfg.analysis.tv_max) a["tv_max"] = *cfg.analysis.tv_max;
    j["analysis"] = std::move(a);
    Json o;
    o["dir"] = cfg.outputs.dir;
    o["basename"] = cfg.outputs.basename;
    Json formats = Json::array();
    if (cfg.outputs.csv) formats.push_back("csv");
    if (cfg.outputs.json) formats.push_back("json");
    o["formats"] = std::move(formats);
    j["outputs"] = std::move(o);
    return j;
}

void apply_overrides(ScenarioConfig& cfg, const CliOverrides& o) {
    if (o.seed) cfg.run.seed = *o.seed;
    if (o.reps) cfg.run.R = *o.reps;
    if (o.cycles) cfg.run.N = *o.cycles;
    if (o.out_dir) cfg.outputs.dir = *o.out_dir;
    if (o.threads) cfg.run.threads = *o.threads;
    if (cfg.run.R < 1) throw config_error("--reps must be at least 1");
    if (cfg.run.N < 1) throw config_error("--cycles must be at least 1");
    if (cfg.run.threads < 0)
        throw config_error("--threads must be non-negative");
}

namespace {

SimulationConfig to_sim_config(const ScenarioConfig& cfg) {
    SimulationConfig s;
    s.protocol = cfg.protocol;
    s.tls = cfg.tls;
    s.gaussian = cfg.gaussian;
    s.modulation = cfg.modulation;
    s.N = cfg.run.N;
    s.R = cfg.run.R;
    s.dt = cfg.run.dt;
    s.k_corr = cfg.run.k_corr;
    s.sigma_cyc = cfg.run.sigma_cyc;
    s.seed = cfg.run.seed;
    s.use_exact_tls_sampler = cfg.run.exact_tls;
    s.threads = cfg.run.threads;
    return s;
}

// Gaussian-equivalent phase correlators of a TLS ensemble: each Lorentzian
// 2(wV)^2 W/(W^2 + omega^2) is an exponentially correlated component with
// D = 2(wV)^2/W and tau = 1/W, so the closed forms apply term by term.
PhaseCorrelators tls_equivalent_correlators(const TlsEnsemble& ens,
                                            const RamseyProtocol& prot,
                                            long max_lag) {
    PhaseCorrelators f;
    f.f.assign(static_cast<size_t>(max_lag) + 1, 0.0);
    for (const auto& t : ens.tls) {
        if (t.W() == 0.0) continue;
        const double wv = t.w_factor() * t.V;
        const ExpCorrelated comp{2.0 * wv * wv / t.W(), 1.0 / t.W()};
        for (long k = 0; k <= max_lag; ++k)
            f.f[static_cast<size_t>(k)] += phase_correlator(comp, prot, k);
    }
    return f;
}

struct TheoryBundle {
    double r1 = 0.0;
    std::vector<double> r2;          // lag k = index + 1
    std::vector<double> r3;          // lag (k, k + offset), k = index + 1
    bool r3_is_gaussian_reference = false; // TLS kinds: Gaussian construction
};

TheoryBundle make_theory(const ScenarioConfig& cfg) {
    TheoryBundle th;
    const long k_max = cfg.analysis.k_max;
    const long off = cfg.analysis.triple_offset;
    if (cfg.noise_kind == "none") {
        th.r1 = ramsey_probability(0.0, cfg.protocol);
        th.r2.assign(static_cast<size_t>(k_max), 0.0);
        th.r3.assign(static_cast<size_t>(k_max), 0.0);
    } else if (cfg.noise_kind == "tls") {
        th.r1 = r1_tls(cfg.tls, cfg.protocol);
        for (long k = 1; k <= k_max; ++k)
            th.r2.push_back(r2_tls_centered(cfg.tls, cfg.protocol, k));
        const auto f =
            tls_equivalent_correlators(cfg.tls, cfg.protocol, k_max + off);
        for (long k = 1; k <= k_max; ++k)
            th.r3.push_back(r3_gauss_centered(f, cfg.protocol, k, k + off));
        th.r3_is_gaussian_reference = true;
    } else {
        const auto f =
            correlators_from_spectrum(*cfg.gaussian, cfg.protocol, k_max + off);
        th.r1 = r1_gauss(f.at(0), cfg.protocol);
        for (long k = 1; k <= k_max; ++k)
            th.r2.push_back(r2_gauss_centered(f, cfg.protocol, k));
        for (long k = 1; k <= k_max; ++k)
            th.r3.push_back(r3_gauss_centered(f, cfg.protocol, k, k + off));
    }
    (void)off;
    return th;
}

std::vector<std::pair<long, long>> triple_lags(long k_max, long off) {
    std::vector<std::pair<long, long>> lags;
    for (long k = 1; k <= k_max; ++k) lags.emplace_back(k, k + off);
    return lags;
}

std::string out_path(const ScenarioConfig& cfg, const std::string& suffix) {
    std::filesystem::create_directories(cfg.outputs.dir);
    return (std::filesystem::path(cfg.outputs.dir) /
            (cfg.outputs.basename + suffix))
        .string();
}

void write_json_file(const std::string& path, const Json& j,
                     std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
    files.push_back(path);
}

Json check_entry(const std::string& name, double value, double bound,
                 bool pass) {
    Json c;
    c["name"] = name;
    c["value"] = value;
    c["bound"] = bound;
    c["pass"] = pass;
    return c;
}

std::vector<std::string> run_analytic(const ScenarioConfig& cfg) {
    std::vector<std::string> files;
    const std::string hdr = serialize_scenario(cfg).dump();
    const bool gaussian_kind =
        cfg.noise_kind != "none" && cfg.noise_kind != "tls";
    TheoryBundle th = make_theory(cfg);

    if (cfg.outputs.csv) {
        const std::string path = out_path(cfg, ".csv");
        CsvWriter csv(path, hdr, {"quantity", "k", "l", "value"});
        csv.row({"r1", "", "", num(th.r1)});
        if (cfg.noise_kind != "none") {
            for (long k = 1; k <= cfg.analysis.k_max; ++k)
                csv.row({"r2", num(k), "", num(th.r2[size_t(k - 1)])});
            if (gaussian_kind)
                for (long k = 1; k <= cfg.analysis.k_max; ++k)
                    csv.row({"r3", num(k), num(k + cfg.analysis.triple_offset),
                             num(th.r3[size_t(k - 1)])});
        }
        files.push_back(path);
    }
    if (cfg.outputs.json) {
        Json s;
        s["scenario"] = cfg.scenario;
        s["config"] = serialize_scenario(cfg);
        s["r1"] = th.r1;
        s["k_max"] = cfg.analysis.k_max;
        s["rows"] = 1 + (cfg.noise_kind == "none"
                             ? 0
                             : cfg.analysis.k_max * (gaussian_kind ? 2 : 1));
        write_json_file(out_path(cfg, "_summary.json"), s, files);
    }
    return files;
}

std::vector<std::string> run_simulate_or_compare(const ScenarioConfig& cfg) {
    const bool with_theory = cfg.scenario == "compare";
    std::vector<std::string> files;
    const std::string hdr = serialize_scenario(cfg).dump();
    const long k_max = cfg.analysis.k_max;
    const long off = cfg.analysis.triple_offset;

    const auto series = run_experiment(to_sim_config(cfg));
    const auto est =
        estimate_correlators(series, k_max, triple_lags(k_max, off));
    TheoryBundle th;
    if (with_theory) th = make_theory(cfg);

    if (cfg.outputs.csv) {
        const std::string path = out_path(cfg, ".csv");
        std::vector<std::string> cols;
        if (with_theory)
            cols = {"k",        "r2_theory", "r2_sim", "r2_stderr",
                    "r3_theory", "r3_sim",    "r3_stderr"};
        else
            cols = {"k", "r2_sim", "r2_stderr", "r3_sim", "r3_stderr"};
        CsvWriter csv(path, hdr, cols);
        for (long k = 1; k <= k_max; ++k) {
            const size_t i = size_t(k - 1);
            std::vector<std::string> row{num(k)};
            if (with_theory) row.push_back(num(th.r2[i]));
            row.push_back(num(est.r2[i].value));
            row.push_back(num(est.r2[i].std_error));
            if (with_theory) row.push_back(num(th.r3[i]));
            row.push_back(num(est.r3[i].value));
            row.push_back(num(est.r3[i].std_error));
            csv.row(row);
        }
        files.push_back(path);
    }
    if (cfg.outputs.json) {
        Json s;
        s["scenario"] = cfg.scenario;
        s["config"] = serialize_scenario(cfg);
        s["repetitions"] = est.repetitions;
        s["r1"] = {{"estimate", est.r1.value}, {"stderr", est.r1.std_error}};
        if (with_theory) {
            const double tol = cfg.analysis.tolerance_sigma;
            Json checks = Json::array();
            s["r1"]["theory"] = th.r1;
            const double r1_err = std::abs(est.r1.value - th.r1);
            const double r1_bound =
                tol * std::max(est.r1.std_error, 1e-300);
            checks.push_back(check_entry("r1_within_tolerance", r1_err,
                                         r1_bound, r1_err <= r1_bound));
            double z2_max = 0.0, z3_max = 0.0;
            long n2_out = 0, n3_out = 0;
            for (long k = 1; k <= k_max; ++k) {
                const size_t i = size_t(k - 1);
                const double z2 = (est.r2[i].value - th.r2[i]) /
                                  std::max(est.r2[i].std_error, 1e-300);
                z2_max = std::max(z2_max, std::abs(z2));
                if (std::abs(z2) > tol) ++n2_out;
                const double z3 = (est.r3[i].value - th.r3[i]) /
                                  std::max(est.r3[i].std_error, 1e-300);
                z3_max = std::max(z3_max, std::abs(z3));
                if (std::abs(z3) > tol) ++n3_out;
            }
            Json r2c;
            r2c["max_abs_z"] = z2_max;
            r2c["n_outside"] = n2_out;
            r2c["n_lags"] = k_max;
            r2c["pass"] = n2_out == 0;
            s["r2"] = std::move(r2c);
            Json r3c;
            r3c["max_abs_z"] = z3_max;
            r3c["n_outside"] = n3_out;
            r3c["n_lags"] = k_max;
            // for TLS noise the r3 reference is the Gaussian construction,
            // so a deviation is signal, not failure
            r3c["checked"] = !th.r3_is_gaussian_reference;
            if (!th.r3_is_gaussian_reference) r3c["pass"] = n3_out == 0;
            s["r3"] = std::move(r3c);
            checks.push_back(check_entry("r2_all_within_sigma",
                                         double(n2_out), 0.0, n2_out == 0));
            if (!th.r3_is_gaussian_reference)
                checks.push_back(check_entry("r3_all_within_sigma",
                                             double(n3_out), 0.0, n3_out == 0));
            s["checks"] = std::move(checks);
            bool pass = r1_err <= r1_bound && n2_out == 0 &&
                        (th.r3_is_gaussian_reference || n3_out == 0);
            s["pass"] = pass;
        }
        write_json_file(out_path(cfg, "_summary.json"), s, files);
    }
    return files;
}

std::vector<std::string> run_distribution(const ScenarioConfig& cfg) {
    std::vector<std::string> files;
    const std::string hdr = serialize_scenario(cfg).dump();
    const long M = cfg.analysis.M;

    const auto series = run_experiment(to_sim_config(cfg));
    const auto hist = block_histogram(series, M);

    double r1_theory;
    OutcomeDistribution stat;
    if (cfg.noise_kind == "tls") {
        r1_theory = r1_tls(cfg.tls, cfg.protocol);
        stat = rho_static_tls(M, cfg.tls, cfg.protocol);
    } else if (cfg.noise_kind == "none") {
        r1_theory = ramsey_probability(0.0, cfg.protocol);
        stat = rho_binomial(M, r1_theory);
    } else {
        const double f0 = phase_correlator(*cfg.gaussian, cfg.protocol, 0);
        r1_theory = r1_gauss(f0, cfg.protocol);
        stat = rho_static_gauss(M, f0, cfg.protocol);
    }
    const auto binom = rho_binomial(M, r1_theory);
    const double tv_static = total_variation(hist, stat);
    const double tv_binom = total_variation(hist, binom);

    if (cfg.outputs.csv) {
        const std::string path = out_path(cfg, ".csv");
        CsvWriter csv(path, hdr,
                      {"m", "empirical", "static_theory", "binomial"});
        for (long m = 0; m <= M; ++m)
            csv.row({num(m), num(hist.probs[size_t(m)]),
                     num(stat.probs[size_t(m)]), num(binom.probs[size_t(m)])});
        files.push_back(path);
    }
    if (cfg.outputs.json) {
        Json s;
        s["scenario"] = cfg.scenario;
        s["config"] = serialize_scenario(cfg);
        s["M"] = M;
        s["blocks_per_repetition"] = cfg.run.N / M;
        s["mean_m"] = hist.mean_m();
        s["r1_theory"] = r1_theory;
        s["sqrt_M_sigma"] = std::sqrt(M * hist.variance_m_over_M());
        s["tv_to_static"] = tv_static;
        s["tv_to_binomial"] = tv_binom;
        if (cfg.analysis.tv_max) {
            Json checks = Json::array();
            checks.push_back(check_entry("tv_to_static", tv_static,
                                         *cfg.analysis.tv_max,
                                         tv_static <= *cfg.analysis.tv_max));
            s["checks"] = std::move(checks);
            s["pass"] = tv_static <= *cfg.analysis.tv_max;
        }
        write_json_file(out_path(cfg, "_summary.json"), s, files);
    }
    return files;
}

std::vector<std::string> run_spectrum(const ScenarioConfig& cfg) {
    std::vector<std::string> files;
    const std::string hdr = serialize_scenario(cfg).dump();

    const auto series = run_experiment(to_sim_config(cfg));
    const auto spec = outcome_power_spectrum(series);
    spec.validate();
    const long n = static_cast<long>(spec.R.size());

    double A_p = 0.0;
    if (cfg.modulation)
        A_p = (2.0 * cfg.modulation->a_p / cfg.modulation->omega_p) *
              std::sin(cfg.modulation->omega_p * cfg.protocol.t_R / 2.0);

    if (cfg.outputs.csv) {
        const std::string path = out_path(cfg, ".csv");
        std::vector<std::string> cols{"m", "R_sim"};
        if (cfg.modulation) cols.push_back("R_peak_theory");
        CsvWriter csv(path, hdr, cols);
        for (long m = 0; m < n; ++m) {
            std::vector<std::string> row{num(m), num(spec.R[size_t(m)])};
            if (cfg.modulation) {
                // the kernel is mirror symmetric: evaluate at the alias
                // closest to the modulation line
                const long mm = std::min(m, n - m);
                row.push_back(num(modulation_peak_theory(
                    A_p, cfg.protocol, n, cfg.modulation->omega_p, mm,
                    cfg.run.sigma_cyc)));
            }
            csv.row(row);
        }
        files.push_back(path);
    }
    if (cfg.outputs.json) {
        Json s;
        s["scenario"] = cfg.scenario;
        s["config"] = serialize_scenario(cfg);
        s["repetitions"] = spec.repetitions;
        s["normalization"] = spec.normalization;
        long peak = 1;
        for (long m = 1; m <= n / 2; ++m)
            if (spec.R[size_t(m)] > spec.R[size_t(peak)]) peak = m;
        s["peak_bin"] = peak;
        s["peak_value"] = spec.R[size_t(peak)];
        s["mirror_value"] = spec.R[size_t(n - peak)];
        if (cfg.modulation) {
            s["expected_peak_bin"] = static_cast<long>(std::lround(
                n * cfg.modulation->omega_p * cfg.protocol.t_cyc /
                (2.0 * kPi)));
            s["peak_theory"] = modulation_peak_theory(
                A_p, cfg.protocol, n, cfg.modulation->omega_p, peak,
                cfg.run.sigma_cyc);
        }
        write_json_file(out_path(cfg, "_summary.json"), s, files);
    }
    return files;
}

} // namespace

std::vector<std::string> run_scenario(const ScenarioConfig& cfg) {
    if (cfg.scenario == "analytic") return run_analytic(cfg);
    if (cfg.scenario == "simulate" || cfg.scenario == "compare")
        return run_simulate_or_compare(cfg);
    if (cfg.scenario == "distribution") return run_distribution(cfg);
    if (cfg.scenario == "spectrum") return run_spectrum(cfg);
    throw config_error("unknown scenario \"" + cfg.scenario + "\"");
}

} // namespace ramsey::cli
