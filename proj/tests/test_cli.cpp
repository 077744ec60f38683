#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "ncofdm_cli_test";

int run(const std::string& args)
{
    const std::string cmd = std::string("\"") + NCOFDM_CLI_PATH + "\" " + args + " >" +
                            (kWork / "stdout.txt").string() + " 2>" +
                            (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& body)
{
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scenario(const std::string& kind)
{
    return (fs::path(NCOFDM_SCENARIO_DIR) / (kind + ".json")).string();
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("complexity run succeeds and writes both artifacts")
    {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
        const fs::path out = kWork / "cx";
        CHECK(run("complexity --config " + scenario("complexity") + " --out " + out.string()) == 0);
        CHECK(fs::exists(out / "complexity.csv"));
        CHECK(fs::exists(out / "complexity.json"));
        CHECK(slurp(kWork / "stdout.txt").find("wrote ") != std::string::npos);
        const std::string csv = slurp(out / "complexity.csv");
        CHECK(csv.find("td-nc-ofdm,256,2048,2,28732,28722") != std::string::npos);
        CHECK(csv.find("nc-ofdm,256,2048,0,524288,523776") != std::string::npos);
    }

    TEST_CASE("configuration errors exit with 2")
    {
        fs::create_directories(kWork);
        const fs::path zero = write_config("zero.json", R"({"symbols": 0})");
        CHECK(run("psd --config " + zero.string() + " --out " + (kWork / "o").string()) == 2);
        CHECK(slurp(kWork / "stderr.txt").find("config error") != std::string::npos);

        const fs::path bad = write_config("bad.json", R"({"K": 256, )");
        CHECK(run("ber --config " + bad.string()) == 2);
        const fs::path unknown = write_config("unknown.json", R"({"colour": "blue"})");
        CHECK(run("sinr --config " + unknown.string()) == 2);
        CHECK(run("spectrogram --config " + zero.string()) == 2);
        CHECK(run("psd") == 2);
        CHECK(run("psd --config " + (kWork / "missing.json").string()) == 2);
        CHECK(run("psd --config " + zero.string() + " --seed abc") == 2);
    }

    TEST_CASE("unwritable output exits with 3")
    {
        fs::create_directories(kWork);
        const fs::path blocker = kWork / "blocker";
        std::ofstream(blocker) << "x";
        CHECK(run("complexity --config " + scenario("complexity") + " --out " +
                  (blocker / "sub").string()) == 3);
        CHECK(slurp(kWork / "stderr.txt").find("runtime error") != std::string::npos);
    }

    TEST_CASE("seeded runs are byte-identical and the seed override is recorded")
    {
        fs::create_directories(kWork);
        const fs::path cfg = write_config(
            "eq.json", R"({"K": 64, "N": 256, "N_cp": 18, "V": [2], "symbols": 200, "seed": 3})");
        const fs::path a = kWork / "a", b = kWork / "b";
        CHECK(run("equivalence --config " + cfg.string() + " --seed 42 --out " + a.string()) == 0);
        CHECK(run("equivalence --config " + cfg.string() + " --seed 42 --out " + b.string()) == 0);
        const std::string csv = slurp(a / "equivalence.csv");
        CHECK(csv == slurp(b / "equivalence.csv"));
        CHECK(slurp(a / "equivalence.json") == slurp(b / "equivalence.json"));
        CHECK(csv.find("# seed: 42\n") != std::string::npos);

        const auto doc = nlohmann::json::parse(slurp(a / "equivalence.json"));
        CHECK(doc["seed"] == 42);
        CHECK(doc["summary"]["equivalence"][0]["max_rel_dev"].get<double>() < 1e-8);
    }

    TEST_CASE("help exits with 0")
    {
        fs::create_directories(kWork);
        CHECK(run("--help") == 0);
        CHECK(slurp(kWork / "stdout.txt").find("psd") != std::string::npos);
    }
}
