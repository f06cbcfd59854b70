#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "lpp/io.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lpp_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Numbers, SeventeenDigitsRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(parse_double(format_double(x)), x);
    EXPECT_THROW(parse_double("1.5x"), Error);
    EXPECT_THROW(parse_double(""), Error);
}

TEST(ResultsCsv, RoundTrip) {
    std::vector<ReplicaResult> rs;
    for (std::size_t i = 0; i < 5; ++i) {
        ReplicaResult r;
        r.param_index = i / 2;
        r.replica_index = i % 2;
        r.derived_seed = derive_seed(7, 3, r.param_index, r.replica_index);
        r.params = {{"n", 1000.0 * (i + 1)}, {"t", 1.0 / 3.0}};
        r.statistics = {{"tf", 0.1 * i + 1e-17}, {"weight", -1.0 / (i + 3.0)}};
        if (i == 4) r.statistics.erase("tf");
        rs.push_back(r);
    }
    std::stringstream ss;
    emit_results_csv(rs, ss);
    const auto back = parse_results_csv(ss);
    ASSERT_EQ(back.size(), rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(back[i].param_index, rs[i].param_index);
        EXPECT_EQ(back[i].replica_index, rs[i].replica_index);
        EXPECT_EQ(back[i].derived_seed, rs[i].derived_seed);
        EXPECT_EQ(back[i].params, rs[i].params);
        EXPECT_EQ(back[i].statistics, rs[i].statistics);
    }
}

TEST(ResultsCsv, EmptyStatisticsGiveHeaderOnly) {
    std::vector<ReplicaResult> rs(3);
    for (auto& r : rs) r.params["n"] = 10;
    std::stringstream ss;
    emit_results_csv(rs, ss);
    EXPECT_EQ(ss.str(), "param_index,replica_index,derived_seed,n\n");
    EXPECT_TRUE(parse_results_csv(ss).empty());
}

TEST(ResultsCsv, RejectsForeignFiles) {
    std::stringstream bad("a,b\n1,2\n");
    EXPECT_THROW(parse_results_csv(bad), Error);
}

TEST(Field, WriteReadRoundTrip) {
    const auto f = sample_field(Region::diagonal_strip(30, 1, 4), 1.5, 77);
    const auto path = scratch("field.csv").string();
    write_field(f, path);
    const auto g = read_field(path);
    ASSERT_EQ(g.size(), f.size());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.points()[i], f.points()[i]);
    EXPECT_EQ(g.seed(), 77u);
    EXPECT_EQ(g.rate(), 1.5);
    EXPECT_DOUBLE_EQ(g.region().area(), f.region().area());
}

TEST(Field, ReadRejectsMissingSidecarAndUnwritablePaths) {
    const auto path = scratch("orphan.csv");
    { std::ofstream(path) << "a,b\n1,2\n"; }
    fs::remove(path.string() + ".json");
    EXPECT_THROW(read_field(path.string()), Error);
    try {
        write_field(sample_field(Region::rectangle(0, 1, 0, 1), 1, 1), "/nonexistent_dir/x.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
    }
}

TEST(KeyValues, ParsesCommentsAndRejectsGarbage) {
    std::stringstream in("# header\nn = 1000, 2000\n\n seed=7 # trailing\nseed = 8\n");
    const auto kv = parse_key_values(in, "test");
    EXPECT_EQ(kv.at("n"), "1000, 2000");
    EXPECT_EQ(kv.at("seed"), "8");
    std::stringstream bad("just words\n");
    EXPECT_THROW(parse_key_values(bad, "test"), Error);
    EXPECT_EQ(parse_double_list("1, 2.5,3"), (std::vector<double>{1, 2.5, 3}));
}

TEST(Regions, JsonRoundTrip) {
    for (const auto& r : {Region::rectangle(0, 1, 2, 3), Region::diagonal_strip(10, 1, 2),
                          Region::clipped_band(0, 5, -1, 1, Rectangle{0, 3, 0, 3})}) {
        const auto back = region_from_json(region_to_json(r));
        EXPECT_EQ(back.kind_name(), r.kind_name());
        EXPECT_DOUBLE_EQ(back.area(), r.area());
    }
}
