#include "cooptrap/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cooptrap;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    std::optional<std::string> env_out;

    void SetUp() override {
        dir = fs::temp_directory_path() / ("cooptrap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path config(const std::string& name, const std::string& text) {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    Result run(std::vector<std::string> args) {
        args.insert(args.begin(), "cooptrap");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        auto env = [this](const char* name) -> std::optional<std::string> {
            return std::string(name) == cli::kOutDirEnv ? env_out : std::nullopt;
        };
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, env);
        return {code, out.str(), err.str()};
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    // Rows of the series CSV as (t, abs_A).
    static std::vector<std::pair<double, double>> abs_column(const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        std::vector<std::pair<double, double>> rows;
        while (std::getline(in, line)) {
            std::vector<double> cells;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ',')) cells.push_back(std::stod(c));
            rows.emplace_back(cells.at(0), cells.at(3));
        }
        return rows;
    }
};

const char* kWaveguideM4 = R"({"bath":{"type":"coupled_cavity","omega0":0,"J":1,"g0":0.2},
  "ensemble":{"M":4,"detuning":0},
  "simulation":{"n_modes":2048,"t_max":400,"n_samples":801,"window":[260,390]}})";

} // namespace

TEST_F(Cli, SimulateWaveguideFourEmitters) {
    const auto r = run({"simulate", "--config", config("c.json", kWaveguideM4).string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("pass"), std::string::npos);
    const auto rows = abs_column(dir / "run_series.csv");
    ASSERT_EQ(rows.size(), 801u);
    double sum = 0.0;
    int n = 0;
    for (const auto& [t, a] : rows)
        if (t >= 260.0 && t <= 390.0) sum += a, ++n;
    EXPECT_NEAR(sum / n, 0.75, 0.02);
    const auto summary = nlohmann::json::parse(slurp(dir / "run_summary.json"));
    EXPECT_EQ(summary["verdict"], "pass");
    EXPECT_EQ(summary["M"], 4);
}

TEST_F(Cli, SimulateDecoupledIsUnity) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0},"ensemble":{"M":3,"Omega":0.7},
        "simulation":{"n_modes":128,"t_max":20,"n_samples":41}})");
    ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", dir.string()}).code, 0);
    for (const auto& [t, a] : abs_column(dir / "run_series.csv")) EXPECT_NEAR(a, 1.0, 1e-13) << t;
}

TEST_F(Cli, SimulateSingleInstant) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":2,"Omega":0},
        "simulation":{"n_samples":1,"times":[0]}})");
    ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", dir.string()}).code, 0);
    std::ifstream in(dir / "run_series.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,re_A,im_A,abs_A,norm,field_pop");
    const auto rows = abs_column(dir / "run_series.csv");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].first, 0.0);
    EXPECT_NEAR(rows[0].second, 1.0, 1e-13);
}

TEST_F(Cli, PolesDecoupledIsEmpty) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0},"ensemble":{"M":2,"Omega":0}})");
    ASSERT_EQ(run({"poles", "--config", cfg.string(), "--out", dir.string()}).code, 0);
    const auto j = nlohmann::json::parse(slurp(dir / "run_poles.json"));
    EXPECT_TRUE(j["bound_energies"].empty());
    EXPECT_EQ(j["condition_value"], 0.0);
    EXPECT_TRUE(j["decoupled"].get<bool>());
    EXPECT_EQ(j["free_atom_pole"]["energy"], 0.0);
}

TEST_F(Cli, PolesWaveguideTwoEmitters) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":2,"detuning":0}})");
    ASSERT_EQ(run({"poles", "--config", cfg.string(), "--out", dir.string()}).code, 0);
    const auto j = nlohmann::json::parse(slurp(dir / "run_poles.json"));
    // Oracle: the spectral module directly.
    const auto ps = find_bound_states({2, 0.0, 1}, CoupledCavity{0.0, 1.0, 0.2});
    ASSERT_EQ(j["bound_energies"].size(), 2u);
    EXPECT_NEAR(j["bound_energies"][0].get<double>(), -j["bound_energies"][1].get<double>(), 1e-12);
    EXPECT_EQ(j["bound_energies"][1].get<double>(), ps.bound_energies[1]);
    for (const auto& r : j["residues"]) {
        EXPECT_GT(r["re"].get<double>(), 0.0);
        EXPECT_LT(r["re"].get<double>(), 0.01);
    }
    EXPECT_EQ(j["dark_weight"], 0.5);
    for (const char* key : {"bound_energies", "residues", "condition_value", "dark_weight", "plateau_band"})
        EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, PolesCustomBathRejected) {
    const auto cfg = config("c.json", R"({"bath":{"type":"custom","omega":[0,1],"J":[0.01,0.01]},"ensemble":{"M":2,"Omega":0.5}})");
    const auto r = run({"poles", "--config", cfg.string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("no closed form; poles require built-in bath"), std::string::npos) << r.err;
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run({"simulate", "--config", (dir / "absent.json").string()}).code, 3);
    EXPECT_EQ(run({"simulate", "--config", config("bad.json", R"({"bath":{}})").string()}).code, 1);
    EXPECT_EQ(run({"simulate"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"reproduce", "fig9"}).code, 1);
    // Bisection cannot isolate a bound state glued to the band edge.
    const auto edge = config("edge.json", R"({"bath":{"type":"coupled_cavity","g0":1e-6},"ensemble":{"M":1,"Omega":0}})");
    EXPECT_EQ(run({"poles", "--config", edge.string(), "--out", dir.string()}).code, 2);
    // The output path is a regular file, so the directory cannot be created.
    std::ofstream(dir / "blocker") << "x";
    const auto ok = config("ok.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":2,"Omega":0}})");
    EXPECT_EQ(run({"poles", "--config", ok.string(), "--out", (dir / "blocker" / "sub").string()}).code, 3);
}

TEST_F(Cli, InvalidConfigComputesNothing) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":0,"Omega":0,"detuning":1},
        "output":{"dir":")" + (dir / "never").string() + R"("}})");
    const auto r = run({"simulate", "--config", cfg.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("M must be >= 1"), std::string::npos);
    EXPECT_NE(r.err.find("mutually exclusive"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "never"));
}

TEST_F(Cli, OutputDirectoryPrecedence) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":2,"Omega":0}})");
    env_out = (dir / "from_env").string();
    ASSERT_EQ(run({"poles", "--config", cfg.string()}).code, 0);
    EXPECT_TRUE(fs::exists(dir / "from_env" / "run_poles.json"));
    ASSERT_EQ(run({"poles", "--config", cfg.string(), "--out", (dir / "from_flag").string()}).code, 0);
    EXPECT_TRUE(fs::exists(dir / "from_flag" / "run_poles.json"));
    const auto cfg2 = config("c2.json", R"({"bath":{"type":"coupled_cavity","g0":0.2},"ensemble":{"M":2,"Omega":0},
        "output":{"dir":")" + (dir / "from_cfg").string() + R"(","prefix":"p"}})");
    ASSERT_EQ(run({"poles", "--config", cfg2.string()}).code, 0);
    EXPECT_TRUE(fs::exists(dir / "from_cfg" / "p_poles.json"));
}

TEST_F(Cli, DeterministicAtomicOutput) {
    const auto cfg = config("c.json", R"({"bath":{"type":"coupled_cavity","g0":0.3},"ensemble":{"Ms":[1,2,3],"Omega":0},
        "simulation":{"n_modes":256,"t_max":60,"n_samples":121}})");
    ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir / "a").string()}).code, 0);
    ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir / "b").string()}).code, 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        ++files;
        EXPECT_EQ(e.path().extension() == ".tmp", false) << e.path();
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    }
    EXPECT_EQ(files, 3u);
    const std::string summary = slurp(dir / "a" / "run_sweep_summary.csv");
    EXPECT_EQ(summary.rfind("M,predicted,measured,min,max,condition_value,verdict\n", 0), 0u);
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
    const auto j = nlohmann::json::parse(slurp(dir / "a" / "run_sweep_summary.json"));
    ASSERT_EQ(j.size(), 3u);
    EXPECT_EQ(j[0]["M"], 1);
    EXPECT_EQ(j[2]["M"], 3);
}

TEST_F(Cli, ReproduceWaveguidePresetWithSingleEmitter) {
    const auto r = run({"reproduce", "fig2", "--out", dir.string(), "--Ms", "1,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "fig2" / "summary.json"));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_LT(j[0]["plateau_measured"].get<double>(), 0.02);
    EXPECT_NEAR(j[1]["plateau_measured"].get<double>(), 0.5, 0.02);
    EXPECT_EQ(j[1]["plateau_predicted"], 0.5);
    EXPECT_TRUE(fs::exists(dir / "fig2" / "series_M1.csv"));
    EXPECT_TRUE(fs::exists(dir / "fig2" / "series_M2.csv"));
    EXPECT_TRUE(fs::exists(dir / "fig2" / "abs_A.csv"));
}
