#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "derval/errors.hpp"
#include "derval/io.hpp"
#include "derval/synth.hpp"

using namespace derval;

namespace {

Calendar two_day_calendar() { return Calendar::build(CivilDate{2012, 1, 1}, 365, {}); }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

std::string make_household_rows(const std::string& id, const std::string& zip, int hours,
                                double value, int zero_hours = 0) {
    std::string rows;
    for (int h = 0; h < hours; ++h) {
        rows += id + "," + zip + "," + std::to_string(h) + "," +
                (h < zero_hours ? "0" : format_double(value)) + "\n";
    }
    return rows;
}

}  // namespace

TEST_CASE("load ingestion applies the mean and zero-reading filters") {
    const Calendar cal = two_day_calendar();
    const int hours = static_cast<int>(cal.hours());
    std::string csv = "household_id,zip,hour_index,kwh\n";
    csv += make_household_rows("H_low", "Z1", hours, 0.05);          // mean 0.05 kW -> dropped
    csv += make_household_rows("H_zeros", "Z1", hours, 1.0, hours * 6 / 10);  // 60% zeros -> dropped
    csv += make_household_rows("H_ok1", "Z1", hours, 0.8);
    csv += make_household_rows("H_ok2", "Z2", hours, 1.5);
    const auto path = temp_file("derval_loads_ok.csv", csv);

    IngestStats stats;
    const auto traces = load_traces_csv(path.string(), cal, &stats);
    REQUIRE(traces.size() == 2);
    CHECK(stats.households_read == 4);
    CHECK(stats.dropped_low_mean == 1);
    CHECK(stats.dropped_zero_heavy == 1);
    CHECK(traces[0].household_id == "H_ok1");
    CHECK(traces[1].household_id == "H_ok2");
    CHECK(traces[0].kwh.hours() == cal.hours());
}

TEST_CASE("load ingestion reports malformed rows with line numbers") {
    const Calendar cal = two_day_calendar();
    const auto bad_number =
        temp_file("derval_loads_bad.csv", "household_id,zip,hour_index,kwh\nH1,Z1,0,oops\n");
    CHECK_THROWS_WITH_AS(load_traces_csv(bad_number.string(), cal, nullptr),
                         doctest::Contains(":2:"), DataError);

    // A household with the wrong number of readings is rejected outright.
    std::string csv = "household_id,zip,hour_index,kwh\nH1,Z1,0,1.0\nH1,Z1,1,1.0\n";
    const auto short_file = temp_file("derval_loads_short.csv", csv);
    CHECK_THROWS_WITH_AS(load_traces_csv(short_file.string(), cal, nullptr),
                         doctest::Contains("expected"), DataError);
}

TEST_CASE("ingestion then re-serialization is lossless") {
    const Calendar cal = two_day_calendar();
    SynthConfig cfg;
    cfg.n_households = 3;
    cfg.n_zips = 2;
    cfg.seed = 11;
    const SynthData data = synth_population(cfg, cal);

    const auto dir = std::filesystem::temp_directory_path();
    const std::string first = (dir / "derval_roundtrip1.csv").string();
    write_loads_csv(first, data.loads);
    const auto traces = load_traces_csv(first, cal, nullptr);
    const std::string second = (dir / "derval_roundtrip2.csv").string();
    write_loads_csv(second, traces);
    CHECK(fnv1a_file_hash(first) == fnv1a_file_hash(second));
}

TEST_CASE("zip to node mapping picks the nearest node with lexicographic ties") {
    std::map<std::string, GeoPoint> zips{{"Z1", {37.0, -122.0}}};
    std::map<std::string, GeoPoint> nodes{{"N_far", {38.0, -121.0}}, {"N_here", {37.0, -122.0}}};
    auto mapping = map_zip_to_node(zips, nodes);
    CHECK(mapping.at("Z1") == "N_here");

    // Exactly equidistant nodes resolve to the smaller id.
    std::map<std::string, GeoPoint> tie_nodes{{"B", {37.0, -121.0}}, {"A", {37.0, -123.0}}};
    CHECK(map_zip_to_node(zips, tie_nodes).at("Z1") == "A");

    std::map<std::string, GeoPoint> many_zips{
        {"Z1", {37.0, -122.0}}, {"Z2", {36.0, -120.0}}, {"Z3", {39.0, -123.0}}};
    std::map<std::string, GeoPoint> one_node{{"N", {37.5, -121.0}}};
    const auto all = map_zip_to_node(many_zips, one_node);
    for (const auto& [zip, node] : all) CHECK(node == "N");

    CHECK_THROWS_AS(map_zip_to_node(zips, {}), DataError);
}

TEST_CASE("synthetic population is deterministic and filter-clean") {
    const Calendar cal = two_day_calendar();
    SynthConfig cfg;
    cfg.n_households = 40;
    cfg.seed = 1234;
    const SynthData a = synth_population(cfg, cal);
    const SynthData b = synth_population(cfg, cal);
    REQUIRE(a.loads.size() == b.loads.size());
    for (std::size_t i = 0; i < a.loads.size(); ++i) {
        CHECK(a.loads[i].household_id == b.loads[i].household_id);
        CHECK(a.loads[i].kwh.v == b.loads[i].kwh.v);
    }
    for (const LoadTrace& t : a.loads) {
        CHECK(t.kwh.mean() >= 0.1);
        std::size_t zeros = 0;
        for (double v : t.kwh.v) {
            CHECK(v >= 0.0);
            if (v == 0.0) ++zeros;
        }
        CHECK(2 * zeros <= t.kwh.hours());
    }
}

TEST_CASE("synthetic mean loads cover the intended range at scale") {
    const Calendar cal = two_day_calendar();
    SynthConfig cfg;
    cfg.n_households = 1000;
    cfg.seed = 77;
    const SynthData data = synth_population(cfg, cal);
    double lo = 1e9, hi = 0.0;
    for (const LoadTrace& t : data.loads) {
        lo = std::min(lo, t.kwh.mean());
        hi = std::max(hi, t.kwh.mean());
    }
    CHECK(lo >= 0.1);
    CHECK(hi <= 25.0);
    CHECK(hi > 5.0);  // the tail must reach multi-kW homes
    CHECK(lo < 0.3);
}

TEST_CASE("synthetic irradiance is nonnegative, dark at night, seasonal") {
    const Calendar cal = two_day_calendar();
    SynthConfig cfg;
    cfg.n_households = 1;
    cfg.n_zips = 2;
    cfg.seed = 5;
    const SynthData data = synth_population(cfg, cal);
    for (const auto& [zip, ghi] : data.ghi_by_zip) {
        double summer_total = 0.0, winter_total = 0.0;
        int summer_days = 0, winter_days = 0;
        for (int j = 0; j < cal.n_days(); ++j) {
            const auto day = ghi.day(j);
            CHECK(day[0] == 0.0);   // local midnight
            CHECK(day[23] == 0.0);  // late night
            double total = 0.0;
            for (double v : day) {
                CHECK(v >= 0.0);
                total += v;
            }
            if (cal.day(j).season == Season::summer) {
                summer_total += total;
                ++summer_days;
            } else {
                winter_total += total;
                ++winter_days;
            }
        }
        CHECK(summer_total / summer_days > winter_total / winter_days);
    }
}

TEST_CASE("lmp ingestion converts units and clamps negatives") {
    const Calendar cal = two_day_calendar();
    std::string csv = "node_id,hour_index,usd_per_mwh\n";
    for (std::size_t h = 0; h < cal.hours(); ++h) {
        csv += "N1," + std::to_string(h) + "," + (h == 0 ? "-50" : "40") + "\n";
    }
    const auto path = temp_file("derval_lmp.csv", csv);
    const auto lmp = load_lmp_csv(path.string(), cal);
    CHECK(lmp.at("N1").v[0] == 0.0);          // negative clamped
    CHECK(lmp.at("N1").v[1] == doctest::Approx(0.04));  // $/MWh -> $/kWh
}
