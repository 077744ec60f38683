#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncofdm/scenario.hpp"

using namespace ncofdm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("ncofdm_scenario_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_SUITE("scenario")
{
    TEST_CASE("defaults per kind")
    {
        const Scenario psd = parse_scenario("psd", json::object());
        CHECK(psd.V_list == std::vector<int>{0, 2, 4});
        CHECK(psd.K == 256);
        CHECK(psd.symbols == 10000);
        const Scenario sinr = parse_scenario("sinr", json::object());
        CHECK(sinr.V_list == std::vector<int>{2, 4});
        CHECK(sinr.ebno_db.back() == 40.0);
        const Scenario eq = parse_scenario("equivalence", json::object());
        CHECK(eq.V_list == std::vector<int>{2});
        const Scenario ber = parse_scenario("ber", json{{"V", 4}});
        CHECK(ber.V_list == std::vector<int>{4});
        CHECK(ber.ebno_db.front() == 0.0);
    }

    TEST_CASE("invalid scenarios are rejected")
    {
        CHECK_THROWS_AS(parse_scenario("spectrum", json::object()), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json::array()), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"symbol", 10}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"symbols", 0}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"symbols", -5}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"K", "256"}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"K", 4096}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"N_cp", -1}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"modulation", "8psk"}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"fit_lo_hz", 8e6}, {"fit_hi_hz", 4e6}}),
                        ConfigError);
        CHECK_THROWS_AS(parse_scenario("psd", json{{"welch_overlap", 2048}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("ber", json{{"channel", "rayleigh"}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("ber", json{{"ebno_db", json::array()}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("ber", json{{"kind", "psd"}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("ber", json{{"seed", -1}}), ConfigError);
        CHECK_THROWS_AS(parse_scenario("sinr", json{{"V", -1}}), ConfigError);
        CHECK_THROWS_AS(load_scenario("psd", "/nonexistent/file.json"), ConfigError);
    }

    TEST_CASE("to_json echoes the parsed values")
    {
        const json in = {{"K", 64}, {"N", 256}, {"N_cp", 18}, {"V", {1, 3}},
                         {"symbols", 50}, {"seed", 7}, {"ebno_db", {1.0, 2.0}}};
        const Scenario sc = parse_scenario("ber", in);
        const json out = sc.to_json();
        CHECK(out["kind"] == "ber");
        CHECK(out["K"] == 64);
        CHECK(out["V"] == json({1, 3}));
        CHECK(out["ebno_db"] == json({1.0, 2.0}));
        CHECK(out["seed"] == 7);
        CHECK(!out.contains("welch_segment"));
        const Scenario again = parse_scenario("ber", out);
        CHECK(again.to_json() == out);
    }

    TEST_CASE("bundled scenario files parse")
    {
        for (const auto& kind : scenario_kinds()) {
            CAPTURE(kind);
            CHECK_NOTHROW(load_scenario(kind, fs::path(NCOFDM_SCENARIO_DIR) / (kind + ".json")));
        }
    }

    TEST_CASE("runs write headers, are deterministic and honour the seed override")
    {
        const json small = {{"K", 32}, {"N", 128}, {"N_cp", 9}, {"V", {0, 2}},
                            {"symbols", 60}, {"block_symbols", 25}, {"seed", 5},
                            {"ebno_db", {0.0, 10.0}}, {"welch_segment", 128},
                            {"welch_overlap", 32}, {"measure_hz", 0.5e6},
                            {"measure_half_width_hz", 3e4}, {"fit_lo_hz", 0.4e6},
                            {"fit_hi_hz", 0.9e6}, {"analytic_draws", 20}};
        const std::vector<std::string> kinds = {"equivalence", "continuity", "complexity",
                                                "psd",         "ber",        "sinr"};
        for (const auto& kind : kinds) {
            CAPTURE(kind);
            json j = small;
            if (kind != "psd")
                for (const char* k : {"welch_segment", "welch_overlap", "measure_hz",
                                      "measure_half_width_hz", "fit_lo_hz", "fit_hi_hz",
                                      "analytic_draws"})
                    j.erase(k);
            if (kind != "ber" && kind != "sinr")
                j.erase("ebno_db");
            const Scenario sc = parse_scenario(kind, j);
            RunOptions opt;
            opt.git_describe = "test";
            opt.out_dir = scratch_dir(kind + "_a");
            const RunReport a = run_scenario(sc, opt);
            opt.out_dir = scratch_dir(kind + "_b");
            const RunReport b = run_scenario(sc, opt);
            const std::string csv = slurp(a.csv);
            CHECK(csv == slurp(b.csv));
            CHECK(slurp(a.json) == slurp(b.json));
            CHECK(csv.rfind("# git: test\n# scenario: ", 0) == 0);
            CHECK(csv.find("# seed: 5\n") != std::string::npos);
            const json doc = json::parse(slurp(a.json));
            CHECK(doc["seed"] == 5);
            CHECK(doc["scenario"]["kind"] == kind);

            opt.seed = 99;
            opt.out_dir = scratch_dir(kind + "_c");
            const RunReport c = run_scenario(sc, opt);
            CHECK(slurp(c.csv).find("# seed: 99\n") != std::string::npos);
            for (const char* s : {"_a", "_b", "_c"})
                fs::remove_all(scratch_dir(kind + s));
        }
    }

    TEST_CASE("study summaries at small scale")
    {
        RunOptions opt;
        opt.out_dir = scratch_dir("summaries");

        const Scenario eq = parse_scenario(
            "equivalence", json{{"K", 64}, {"N", 256}, {"N_cp", 18}, {"V", {1, 2}}, {"symbols", 100}});
        const RunReport r = run_scenario(eq, opt);
        for (const auto& e : r.summary["equivalence"]) {
            CHECK(e["pass"] == true);
            CHECK(e["max_rel_dev"].get<double>() < 1e-8);
        }

        const RunReport cx = run_scenario(parse_scenario("complexity", json::object()), opt);
        REQUIRE(cx.summary["table_discrepancies"].size() == 1);
        CHECK(cx.summary["table_discrepancies"][0]["formula_adds"] == 8194);
        CHECK(cx.summary["table_discrepancies"][0]["table_adds"] == 8196);

        const RunReport ct = run_scenario(
            parse_scenario("continuity", json{{"K", 64}, {"N", 256}, {"N_cp", 18}, {"symbols", 50}}),
            opt);
        for (const auto& e : ct.summary["continuity"])
            CHECK(e["max_scaled_residual"].get<double>() < 1e-9);
        fs::remove_all(opt.out_dir);
    }

    TEST_CASE("unwritable output directory raises OutputError")
    {
        const fs::path file = scratch_dir("blocker");
        std::ofstream(file) << "x";
        RunOptions opt;
        opt.out_dir = file / "sub";
        CHECK_THROWS_AS(run_scenario(parse_scenario("complexity", json::object()), opt), OutputError);
        fs::remove(file);
    }
}
