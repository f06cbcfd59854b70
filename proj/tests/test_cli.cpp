#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lpp/cli.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "lppsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("lpp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

} // namespace

TEST_F(Cli, SampleIsDeterministic) {
    ASSERT_EQ(run({"sample", "--region", "0,10,0,10", "--rate", "1", "--seed", "7", "--out", path("f.csv")}).code, 0);
    ASSERT_EQ(run({"sample", "--region", "0,10,0,10", "--rate", "1", "--seed", "7", "--out", path("g.csv")}).code, 0);
    EXPECT_EQ(slurp(path("f.csv")), slurp(path("g.csv")));
    EXPECT_FALSE(slurp(path("f.csv")).empty());
    const auto meta = json::parse(slurp(path("f.csv.json")));
    EXPECT_EQ(meta["seed"], 7);
    EXPECT_EQ(meta["version"], std::string(version));
    EXPECT_EQ(meta["invocation"]["config"]["region"], "0,10,0,10");
}

TEST_F(Cli, EnergyOutsideTheRegionIsInfeasible) {
    ASSERT_EQ(run({"sample", "--region", "0,10,0,10", "--seed", "7", "--out", path("f.csv")}).code, 0);
    const auto r = run({"energy", "--field", path("f.csv"), "--u", "0,0", "--v", "20,20"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "RegionTooSmall");
    EXPECT_TRUE(r.out.empty());

    const auto ok = run({"energy", "--field", path("f.csv"), "--u", "0,0", "--v", "10,10"});
    ASSERT_EQ(ok.code, 0);
    const auto j = json::parse(ok.out);
    EXPECT_EQ(j["energy"], energy(read_field(path("f.csv")), {0, 0}, {10, 10}));
    EXPECT_EQ(j["config"]["v"], "10,10");
}

TEST_F(Cli, SelftestPasses) {
    const auto r = run({"selftest", "--instances", "40"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"energy", "--field", "x.csv", "--bogus", "1"}).code, 1);
    EXPECT_EQ(run({"energy", "--u", "0,0", "--v", "1,1"}).code, 1); // no field
    EXPECT_EQ(run({"sample", "--region", "0,10,0"}).code, 1);
    EXPECT_EQ(run({"campaign", "--experiment", "nope", "--n", "10"}).code, 1);
    const auto r = run({"energy", "--field", path("missing.csv"), "--u", "0,0", "--v", "1,1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.err)["error"], "IoError");
}

TEST_F(Cli, IncompatibleEndpointsAndMemoryGuardExitTwo) {
    EXPECT_EQ(run({"polymer", "--n", "8", "--u", "0,0", "--v", "3,1"}).code, 2);
    EXPECT_EQ(run({"campaign", "--experiment", "tf_tail", "--n", "1e7", "--replicas", "1"}).code, 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    ASSERT_EQ(run({"sample", "--region", "0,10,0,10", "--seed", "3", "--out", path("f.csv")}).code, 0);
    {
        std::ofstream cfg(path("c.txt"));
        cfg << "# energy between two corners\nfield = " << path("f.csv") << "\nu = 0,0\nv = 10,10\n";
    }
    const auto from_file = run({"energy", "--config", path("c.txt")});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(json::parse(from_file.out)["config"]["v"], "10,10");
    const auto overridden = run({"energy", "--config", path("c.txt"), "--v", "5,5"});
    ASSERT_EQ(overridden.code, 0);
    const auto j = json::parse(overridden.out);
    EXPECT_EQ(j["config"]["v"], "5,5");
    EXPECT_EQ(j["energy"], energy(read_field(path("f.csv")), {0, 0}, {5, 5}));

    std::ofstream(path("bad.txt")) << "colour = blue\n";
    EXPECT_EQ(run({"energy", "--config", path("bad.txt")}).code, 1);
}

TEST_F(Cli, CampaignIsIndependentOfWorkers) {
    const std::vector<std::string> base{"campaign", "--experiment", "curvature", "--n", "200", "--s", "-0.5,0.5",
                                        "--replicas", "12", "--seed", "5", "--k-trunc", "2"};
    auto one = base, eight = base;
    one.insert(one.end(), {"--workers", "1", "--out", path("one.csv")});
    eight.insert(eight.end(), {"--workers", "8", "--out", path("eight.csv")});
    ASSERT_EQ(run(one).code, 0);
    ASSERT_EQ(run(eight).code, 0);
    EXPECT_EQ(slurp(path("one.csv")), slurp(path("eight.csv")));
    EXPECT_EQ(slurp(path("one.csv.summary.json")), slurp(path("eight.csv.summary.json")));
    const auto summary = json::parse(slurp(path("one.csv.summary.json")));
    EXPECT_TRUE(summary_schema_errors(summary).empty());
    EXPECT_EQ(summary["config"]["base_seed"], 5);
}

TEST_F(Cli, GeodesicAndPolymerOutputs) {
    ASSERT_EQ(run({"sample", "--region", "0,10,0,10", "--seed", "11", "--out", path("f.csv")}).code, 0);
    const auto g = run({"geodesic", "--field", path("f.csv"), "--u", "0,0", "--v", "10,10"});
    ASSERT_EQ(g.code, 0);
    const auto j = json::parse(g.out);
    EXPECT_EQ(j["uppermost"].size(), j["energy"].get<std::size_t>());
    EXPECT_EQ(j["lowermost"].size(), j["energy"].get<std::size_t>());

    const auto p = run({"polymer", "--n", "100", "--u", "-0.5,0", "--v", "0.5,1", "--k-trunc", "2", "--out", path("p.csv")});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_EQ(slurp(path("p.csv")).substr(0, 4), "t,x\n");
    EXPECT_TRUE(fs::exists(path("p.csv.json")));

    const auto prof = run({"profile", "--n", "100", "--k-trunc", "1", "--format", "json"});
    ASSERT_EQ(prof.code, 0);
    EXPECT_EQ(json::parse(prof.out)["nodes"][0][0], 1.0);
}
