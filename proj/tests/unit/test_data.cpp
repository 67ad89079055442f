#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "mislearn/config.hpp"
#include "mislearn/csv.hpp"
#include "mislearn/panel.hpp"

using namespace mislearn;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("month index arithmetic and parsing") {
    const MonthIndex dec{1999, 12};
    CHECK(dec.next() == MonthIndex{2000, 1});
    CHECK(MonthIndex{2000, 1}.prev() == dec);
    CHECK(months_between(MonthIndex{1963, 7}, MonthIndex{1963, 10}) == 3);
    CHECK(months_between(MonthIndex{1963, 7}, MonthIndex{1962, 7}) == -12);
    CHECK(parse_month("196307") == MonthIndex{1963, 7});
    CHECK(parse_month("1963-07") == MonthIndex{1963, 7});
    CHECK(MonthIndex{1963, 7}.str() == "1963-07");
    CHECK_THROWS_AS(parse_month("1963/07"), DataError);
    CHECK_THROWS_AS(parse_month("196313"), DataError);
    CHECK_THROWS_AS(parse_month("07-1963"), DataError);
}

TEST_CASE("wide csv with percent units") {
    const auto path = write_temp("wide.csv",
                                 "date,MKT,HML\n"
                                 "196307, 0.50, -0.41\n"
                                 "196308, 1.20, \n"
                                 "196309, -0.30, 0.80\n");
    const ReturnPanel panel = load_returns(path, Layout::Wide, Unit::Percent);
    CHECK(panel.n_series() == 2);
    const auto mkt = panel.observations("MKT");
    REQUIRE(mkt.size() == 3);
    CHECK(mkt[0].t == MonthIndex{1963, 7});
    CHECK(mkt[0].ret == doctest::Approx(0.0050).epsilon(1e-12));
    const auto hml = panel.observations("HML");
    REQUIRE(hml.size() == 2);  // empty cell is a gap
    CHECK(hml[0].ret == doctest::Approx(-0.0041).epsilon(1e-12));
    CHECK(hml[1].t == MonthIndex{1963, 9});
}

TEST_CASE("duplicate key and malformed rows are rejected with line numbers") {
    const auto dup = write_temp("dup.csv",
                                "series,date,ret\n"
                                "HML,1963-07,0.5\n"
                                "HML,196307,0.7\n");
    CHECK_THROWS_WITH_AS(load_returns(dup, Layout::Long, Unit::Percent),
                         doctest::Contains("line 3"), DataError);

    const auto bad_date = write_temp("bad_date.csv", "series,date,ret\nHML,07-1963,0.5\n");
    CHECK_THROWS_WITH_AS(load_returns(bad_date, Layout::Long, Unit::Percent),
                         doctest::Contains("line 2"), DataError);

    const auto bad_num = write_temp("bad_num.csv", "series,date,ret\nHML,196307,x.5\n");
    CHECK_THROWS_WITH_AS(load_returns(bad_num, Layout::Long, Unit::Percent),
                         doctest::Contains("line 2"), DataError);

    CHECK_THROWS_AS(load_returns("/nonexistent/file.csv", Layout::Long, Unit::Decimal), DataError);
}

TEST_CASE("round-trip reproduces the observation multiset and decimal loading never rescales") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 0.05);
    ReturnPanel panel;
    for (const std::string id : {"A", "B", "C"}) {
        MonthIndex t{1990, 1};
        for (int i = 0; i < 60; ++i) {
            t = t.next();
            if (rng() % 5 == 0) continue;  // gaps
            panel.add(id, t, gauss(rng));
        }
    }
    const auto path = write_temp("roundtrip.csv", "");
    write_panel(panel, path);
    const ReturnPanel loaded = load_returns(path, Layout::Long, Unit::Decimal);
    REQUIRE(loaded.series_ids() == panel.series_ids());
    for (const auto& id : panel.series_ids()) {
        const auto& a = panel.observations(id);
        const auto& b = loaded.observations(id);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].t == b[i].t);
            CHECK(a[i].ret == doctest::Approx(b[i].ret).epsilon(1e-12));
        }
    }
    // loading the same decimal file again is idempotent
    write_panel(loaded, path);
    const ReturnPanel again = load_returns(path, Layout::Long, Unit::Decimal);
    for (const auto& id : panel.series_ids()) {
        CHECK(again.observations(id)[0].ret ==
              doctest::Approx(loaded.observations(id)[0].ret).epsilon(1e-15));
    }
}

TEST_CASE("align_common_sample keeps the intersection and is idempotent") {
    ReturnPanel panel;
    for (int i = 0; i < 24; ++i) panel.add("X", MonthIndex{1963, 1}.plus(i), 0.01);
    for (int i = 6; i < 30; ++i) panel.add("Y", MonthIndex{1963, 1}.plus(i), 0.02);

    const auto aligned = panel.align_common_sample({"X", "Y"});
    CHECK(aligned.observations("X").size() == 18);
    CHECK(aligned.observations("Y").size() == 18);
    CHECK(aligned.observations("X").front().t == MonthIndex{1963, 7});
    CHECK(aligned.observations("X").back().t == MonthIndex{1964, 12});

    const auto twice = aligned.align_common_sample({"X", "Y"});
    CHECK(twice.n_observations() == aligned.n_observations());

    ReturnPanel disjoint;
    disjoint.add("A", MonthIndex{1990, 1}, 0.0);
    disjoint.add("B", MonthIndex{1991, 1}, 0.0);
    CHECK_THROWS_AS(disjoint.align_common_sample({"A", "B"}), DataError);
    CHECK_THROWS_AS(panel.align_common_sample({"X", "Z"}), DataError);
}

TEST_CASE("exogenous series loads date,value") {
    const auto path = write_temp("exo.csv", "date,value\n2016-01,0.2845\n2016-02,0.2850\n");
    const ExogenousSeries s = load_exogenous(path);
    CHECK(s.values.size() == 2);
    CHECK(*s.at(MonthIndex{2016, 1}) == doctest::Approx(0.2845));
    CHECK_FALSE(s.at(MonthIndex{2015, 12}).has_value());

    const auto dup = write_temp("exo_dup.csv", "date,value\n2016-01,0.1\n201601,0.2\n");
    CHECK_THROWS_AS(load_exogenous(dup), DataError);
}

TEST_CASE("key-value config parses sections, lists and rejects unknown keys") {
    const auto cfg = KeyValueConfig::parse_string(
        "seed = 42\n"
        "# comment\n"
        "[data]\n"
        "returns = a.csv   # trailing comment\n"
        "series = MKT, SMB,HML\n"
        "common_sample = true\n"
        "[fit]\n"
        "spike_quantile = 0.9\n");
    CHECK(cfg.get_u64("", "seed", 0) == 42);
    CHECK(cfg.get_str("data", "returns", "") == "a.csv");
    CHECK(cfg.get_list("data", "series") == std::vector<std::string>{"MKT", "SMB", "HML"});
    CHECK(cfg.get_bool("data", "common_sample", false));
    CHECK(cfg.get_double("fit", "spike_quantile", 0.0) == doctest::Approx(0.9));
    CHECK(cfg.get_int("fit", "missing", 5) == 5);

    CHECK_THROWS_WITH_AS(cfg.validate("data", {"returns", "series"}),
                         doctest::Contains("common_sample"), ConfigError);
    CHECK_NOTHROW(cfg.validate("data", {"returns", "series", "common_sample"}));
    CHECK_THROWS_WITH_AS(cfg.validate_sections({"data"}), doctest::Contains("fit"), ConfigError);

    CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse_string("no equal sign\n"), ConfigError);
    const auto bad = KeyValueConfig::parse_string("[x]\nv = abc\n");
    CHECK_THROWS_AS(bad.get_double("x", "v", 0.0), ConfigError);
    CHECK_THROWS_AS(bad.get_bool("x", "v", false), ConfigError);
}
