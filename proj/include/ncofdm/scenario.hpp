#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ncofdm/config.hpp"

namespace ncofdm {

/// An output file could not be created or written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One experiment as read from a JSON scenario file. Every key is optional;
/// unknown keys are rejected.
struct Scenario {
    std::string kind;  // psd | ber | sinr | equivalence | complexity | continuity

    int K = 256;
    int N = 2048;
    int N_cp = 144;
    std::vector<int> V_list;
    Modulation modulation = Modulation::Qam16;
    double delta_f = 15e3;
    std::vector<int> subcarriers;  // empty: contiguous {-K/2 .. K/2-1}

    std::size_t symbols = 10000;
    std::size_t block_symbols = 1000;
    std::uint64_t seed = 1;

    std::vector<double> ebno_db;
    std::string channel = "eva";  // eva | awgn
    double doppler_hz = 222.0;

    int welch_segment = 2048;
    int welch_overlap = 512;
    double measure_hz = 4e6;
    double measure_half_width_hz = 1e5;
    double fit_lo_hz = 4e6;
    double fit_hi_hz = 8e6;
    std::size_t analytic_draws = 500;

    double tolerance = 1e-8;

    SystemConfig config(int V) const;
    nlohmann::json to_json() const;
};

const std::vector<std::string>& scenario_kinds();

/// Throws ConfigError on unknown kinds or keys, wrong value types and
/// invalid parameter combinations.
Scenario parse_scenario(std::string_view kind, const nlohmann::json& j);
Scenario load_scenario(std::string_view kind, const std::filesystem::path& file);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool paper_scale = false;  // 10^5 symbols
    std::string git_describe = "unknown";
};

struct RunReport {
    std::filesystem::path csv;
    std::filesystem::path json;
    nlohmann::json summary;
};

/// Runs the study and writes <out>/<kind>.csv and <out>/<kind>.json. Both
/// files start with the git description, the scenario echo and the seed;
/// nothing in them depends on wall-clock time.
RunReport run_scenario(Scenario sc, const RunOptions& opt);

}  // namespace ncofdm
