#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qep/config_io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(QEPSIM_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("qepsim_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, TableCsvAndJson) {
    ASSERT_EQ(run("table --preset 3He --out " + path("t.csv")), 0);
    const auto csv = slurp(path("t.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,s,principle,probability,log10_probability,provenance");
    ASSERT_EQ(run("table --preset 171Yb --format json --out " + path("t.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("t.json")));
    ASSERT_EQ(j.at("rows").size(), 5u);
    EXPECT_NEAR(j.at("rows")[1].at("log10_probability").get<double>(), -38.911, 1e-3);
    const auto spec = qep::parse_config(j.at("config"));
    EXPECT_EQ(spec.config.mass_u, 170.936);
}

TEST_F(Cli, TableZeroModel) {
    ASSERT_EQ(run("table --xi-zero --out " + path("z.csv")), 0);
    std::istringstream in(slurp(path("z.csv")));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_NE(line.find(",0,-inf,"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 5);
}

TEST_F(Cli, ConfigFileRoundTrip) {
    std::ofstream(path("c.json")) << R"({"isotope": "3He", "nu": 1.25, "xi_I": {"a": 0.5}})";
    ASSERT_EQ(run("table --format json --config " + path("c.json") + " --out " + path("o.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("o.json")));
    std::ofstream(path("echo.json")) << j.at("config").dump();
    ASSERT_EQ(run("table --format json --config " + path("echo.json") + " --out " + path("o2.json")), 0);
    EXPECT_EQ(slurp(path("o.json")), slurp(path("o2.json")));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("bogus"), 2);
    EXPECT_EQ(run("table --preset 137Cs"), 2);
    EXPECT_EQ(run("table --format xml"), 2);
    EXPECT_EQ(run("table --config /nonexistent.json"), 2);
    EXPECT_EQ(run("table --n-max 1"), 2);
    EXPECT_EQ(run("shots --n 1e6"), 2);
    EXPECT_EQ(run("shots --n 0 --seed 1"), 2);
    EXPECT_EQ(run("shots --n 2e18 --seed 1"), 2);
    EXPECT_EQ(run("verify --lambdas 1e-4"), 2);
    EXPECT_EQ(run("thermal"), 2);
    EXPECT_EQ(run("thermal --T -1"), 2);
    EXPECT_EQ(run("--help"), 0);
    std::ofstream(path("res.json")) << R"({"mass_u": 3.016, "moment_nm": 2.128, "B_tesla": 0.0})";
    EXPECT_EQ(run("table --config " + path("res.json")), 3);
}

TEST_F(Cli, VerifyPassesAndSabotageFails) {
    EXPECT_EQ(run("verify --n-max 40 --format json --out " + path("v.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("v.json")));
    EXPECT_TRUE(j.at("passed").get<bool>());
    for (const auto& s : j.at("sweeps")) EXPECT_NEAR(s.at("slope").get<double>(), 2.0, 0.2);
    EXPECT_EQ(run("verify --n-max 40 --sabotage-first-order 1.5"), 4);
}

TEST_F(Cli, FreefallRecoversNu) {
    ASSERT_EQ(run("freefall --nu 1.3 --format json --out " + path("f.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("f.json")));
    EXPECT_NEAR(j.at("nu_hat").get<double>(), 1.3, 1e-10);
    EXPECT_LT(j.at("relative_deviation").get<double>(), 1e-8);
}

TEST_F(Cli, ThermalRatio) {
    ASSERT_EQ(run("thermal --T 890e-12 --preset 3He --format json --out " + path("th.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("th.json")));
    const double ratio = j.at("rows")[0].at("ratio").get<double>();
    EXPECT_GE(ratio, -3.0);
    EXPECT_LE(ratio, -1.0);
    ASSERT_EQ(run("thermal --T 1e-10,890e-12 --out " + path("th.csv")), 0);
    std::istringstream in(slurp(path("th.csv")));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 3);
}

TEST_F(Cli, ShotsAreReproducible) {
    ASSERT_EQ(run("shots --n 1e6 --seed 7 --out " + path("a.csv")), 0);
    ASSERT_EQ(run("shots --n 1e6 --seed 7 --out " + path("b.csv")), 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    ASSERT_EQ(run("shots --n 1e6 --seed 7 --format json --out " + path("a.json")), 0);
    const auto j = nlohmann::json::parse(slurp(path("a.json")));
    EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 7u);
    EXPECT_EQ(j.at("bounds").size(), 5u);
    EXPECT_EQ(j.at("records").size(), 6u);
}

TEST_F(Cli, OutputWrittenAtomically) {
    ASSERT_EQ(run("table --out " + path("t.csv")), 0);
    for (const auto& e : fs::directory_iterator(dir_)) EXPECT_EQ(e.path().filename(), "t.csv");
}
