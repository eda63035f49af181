#include <doctest.h>

#include "derval/calendar.hpp"
#include "derval/errors.hpp"

using namespace derval;

TEST_CASE("build_calendar flags holidays, weekdays, and seasons") {
    const Calendar cal =
        Calendar::build(CivilDate{2011, 11, 1}, 366, default_holidays_2011_2012());

    const int july4 = cal.day_index(CivilDate{2012, 7, 4});
    REQUIRE(july4 >= 0);
    CHECK(cal.day(july4).is_holiday);
    CHECK_FALSE(cal.peak_eligible(july4));

    const int july3 = cal.day_index(CivilDate{2012, 7, 3});
    CHECK_FALSE(cal.day(july3).is_holiday);
    CHECK_FALSE(cal.day(july3).is_weekend);  // a Tuesday
    CHECK(cal.peak_eligible(july3));

    CHECK(cal.day_index(CivilDate{2011, 11, 1}) == 0);
    CHECK(cal.day_index(CivilDate{2012, 10, 31}) == 365);
    CHECK(cal.day_index(CivilDate{2012, 11, 1}) == -1);

    // 2011-11-01 was a Tuesday.
    CHECK(cal.day(0).weekday == 2);
}

TEST_CASE("season follows the June-September month rule") {
    const Calendar cal = Calendar::build(CivilDate{2012, 1, 1}, 366, {});
    CHECK(cal.day(cal.day_index(CivilDate{2012, 6, 15})).season == Season::summer);
    CHECK(cal.day(cal.day_index(CivilDate{2012, 5, 31})).season == Season::winter);
    CHECK(cal.day(cal.day_index(CivilDate{2012, 9, 30})).season == Season::summer);
    CHECK(cal.day(cal.day_index(CivilDate{2012, 10, 1})).season == Season::winter);
    for (int j = 0; j < cal.n_days(); ++j) {
        const DayInfo& d = cal.day(j);
        const bool summer_month = d.date.month >= 6 && d.date.month <= 9;
        CHECK((d.season == Season::summer) == summer_month);
    }
}

TEST_CASE("calendar rejects bad inputs") {
    CHECK_THROWS_AS(Calendar::build(CivilDate{2012, 1, 1}, 100, {}), ConfigError);
    // Holiday outside the simulated year.
    CHECK_THROWS_AS(Calendar::build(CivilDate{2012, 1, 1}, 366, {CivilDate{2011, 7, 4}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_date("2012-13-01"), ConfigError);
    CHECK_THROWS_AS(parse_date("2011-02-29"), ConfigError);
    CHECK(parse_date("2012-02-29") == CivilDate{2012, 2, 29});
}

TEST_CASE("slice_day partitions the series") {
    HourlySeries constant(24 * 366, 2.0);
    for (int j : {0, 100, 365}) {
        const auto day = slice_day(constant, j);
        REQUIRE(day.size() == 24);
        for (double v : day) CHECK(v == 2.0);
    }

    HourlySeries ramp(24 * 366);
    for (std::size_t h = 0; h < ramp.hours(); ++h) ramp.v[h] = static_cast<double>(h);
    CHECK(slice_day(ramp, 1)[0] == 24.0);

    // Re-concatenating every slice reproduces the series.
    std::vector<double> rebuilt;
    for (int j = 0; j < ramp.days(); ++j) {
        const auto day = slice_day(ramp, j);
        rebuilt.insert(rebuilt.end(), day.begin(), day.end());
    }
    CHECK(rebuilt == ramp.v);

    CHECK_THROWS_AS(slice_day(ramp, 366), DataError);
    CHECK_THROWS_AS(slice_day(ramp, -1), DataError);
}

TEST_CASE("holiday file parsing accepts comments and blanks") {
    const std::string text = "# federal holidays\n2012-07-04\n\n  2012-09-03 # labor day\n";
    const auto dates = parse_holiday_lines(text, "inline");
    REQUIRE(dates.size() == 2);
    CHECK(dates[0] == CivilDate{2012, 7, 4});
    CHECK(dates[1] == CivilDate{2012, 9, 3});
    CHECK_THROWS_AS(parse_holiday_lines("2012/07/04\n", "inline"), ConfigError);
}
