#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace derval {

enum class Season : std::uint8_t { summer, winter };

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(CivilDate d);
CivilDate civil_from_days(std::int64_t z);

// 0 = Sunday .. 6 = Saturday.
int weekday_from_days(std::int64_t z);

CivilDate parse_date(const std::string& iso);  // "YYYY-MM-DD"
std::string format_date(CivilDate d);

struct DayInfo {
    CivilDate date;
    int weekday = 0;  // 0 = Sunday .. 6 = Saturday
    bool is_weekend = false;
    bool is_holiday = false;
    Season season = Season::winter;
};

// Canonical time axis: every day is exactly 24 naive local hours.
// Summer is June through September; winter is October through May.
class Calendar {
public:
    static Calendar build(CivilDate start, int n_days, const std::vector<CivilDate>& holidays);

    int n_days() const { return static_cast<int>(days_.size()); }
    std::size_t hours() const { return days_.size() * 24; }
    const DayInfo& day(int j) const { return days_.at(static_cast<std::size_t>(j)); }
    CivilDate start() const { return start_; }

    // Peak TOU rates apply only on non-holiday weekdays.
    bool peak_eligible(int j) const {
        const DayInfo& d = day(j);
        return !d.is_weekend && !d.is_holiday;
    }

    // Index of a date within the simulated year; negative if outside.
    int day_index(CivilDate d) const;

private:
    CivilDate start_;
    std::vector<DayInfo> days_;
};

// One ISO-8601 date per line; '#' starts a comment; blank lines ignored.
std::vector<CivilDate> load_holiday_file(const std::string& path);
std::vector<CivilDate> parse_holiday_lines(const std::string& text, const std::string& origin);

// US federal holidays (observed) falling inside Nov 2011 - Oct 2012, used
// when no holiday file is configured.
const std::vector<CivilDate>& default_holidays_2011_2012();

// A year of hourly values; the unit (kWh, kWh/m2, $/kWh) is by convention of
// the owning field.
struct HourlySeries {
    std::vector<double> v;

    HourlySeries() = default;
    explicit HourlySeries(std::size_t hours, double fill = 0.0) : v(hours, fill) {}

    std::size_t hours() const { return v.size(); }
    int days() const { return static_cast<int>(v.size() / 24); }

    std::span<const double> day(int j) const;
    std::span<double> day(int j);

    double sum() const;
    double mean() const { return v.empty() ? 0.0 : sum() / static_cast<double>(v.size()); }
};

// slice_day with bounds checking; spans hours 24j..24j+23.
std::span<const double> slice_day(const HourlySeries& s, int j);

struct LoadTrace {
    std::string household_id;
    std::string zip;
    HourlySeries kwh;
};

}  // namespace derval
