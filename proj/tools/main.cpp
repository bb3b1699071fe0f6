#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ramsey/errors.hpp"
#include "scenario.hpp"

namespace {

void print_files(const std::vector<std::string>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

} // namespace

int main(int argc, char** argv) {
    using namespace ramsey;
    using namespace ramsey::cli;

    CLI::App app{"Ramsey-protocol noise characterization toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    CliOverrides o;
    app.add_option("--seed", o.seed, "override the RNG seed");
    app.add_option("--reps", o.reps, "override the repetition count");
    app.add_option("--cycles", o.cycles, "override the cycles per repetition");
    app.add_option("--out-dir", o.out_dir, "directory for output files");
    app.add_option("--threads", o.threads, "worker threads (0: all cores)");
    app.add_option("--tolerance-profile", o.tolerance_profile,
                   "tolerance/scale profile for reproduce targets")
        ->check(CLI::IsMember({"desk", "paper"}));

    std::string config_path;
    std::string target;
    for (const auto& name :
         {"analytic", "simulate", "compare", "distribution", "spectrum"}) {
        auto* sub = app.add_subcommand(
            name, std::string("run a \"") + name + "\" scenario config");
        sub->add_option("config", config_path, "JSON scenario config file")
            ->required();
    }
    auto* rep = app.add_subcommand(
        "reproduce", "regenerate a named study dataset end to end");
    rep->add_option("target", target, "dataset name, e.g. fig3 or tableD1")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        if (sub->get_name() == "reproduce") {
            print_files(run_reproduce(target, o));
        } else {
            auto cfg = parse_scenario_file(config_path, sub->get_name());
            apply_overrides(cfg, o);
            print_files(run_scenario(cfg));
        }
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const resource_limit_error& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 3;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
