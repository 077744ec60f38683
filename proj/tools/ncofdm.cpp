#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ncofdm/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"NC-OFDM waveform lab: sidelobe suppression studies"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool paper_scale = false;

    for (const auto& kind : ncofdm::scenario_kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " study");
        sub->add_option("--config", config_path, "scenario JSON file")->required();
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--paper-scale", paper_scale, "use 10^5 symbols");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        ncofdm::RunOptions opt;
        opt.out_dir = out_dir;
        opt.paper_scale = paper_scale;
        opt.git_describe = NCOFDM_GIT_DESCRIBE;
        if (sub->count("--seed") > 0)
            opt.seed = seed;
        const ncofdm::Scenario sc = ncofdm::load_scenario(sub->get_name(), config_path);
        const ncofdm::RunReport report = ncofdm::run_scenario(sc, opt);
        std::cout << report.summary.dump(2) << "\n";
        std::cout << "wrote " << report.csv.string() << " and " << report.json.string() << "\n";
    } catch (const ncofdm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
