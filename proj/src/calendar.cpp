#include "derval/calendar.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "derval/errors.hpp"

namespace derval {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(CivilDate d) {
    int y = d.year;
    const unsigned m = static_cast<unsigned>(d.month);
    const unsigned dd = static_cast<unsigned>(d.day);
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dd - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(dd)};
}

int weekday_from_days(std::int64_t z) {
    return static_cast<int>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);
}

CivilDate parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream in(iso);
    in >> y >> dash1 >> m >> dash2 >> d;
    if (!in || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 || d > 31) {
        throw ConfigError("invalid ISO-8601 date: '" + iso + "'");
    }
    CivilDate date{y, m, d};
    if (civil_from_days(days_from_civil(date)) != date) {
        throw ConfigError("nonexistent calendar date: '" + iso + "'");
    }
    return date;
}

std::string format_date(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

Calendar Calendar::build(CivilDate start, int n_days, const std::vector<CivilDate>& holidays) {
    if (n_days != 365 && n_days != 366) {
        throw ConfigError("calendar length must be 365 or 366 days, got " + std::to_string(n_days));
    }
    const std::int64_t z0 = days_from_civil(start);
    for (const CivilDate& h : holidays) {
        const std::int64_t zh = days_from_civil(h);
        if (zh < z0 || zh >= z0 + n_days) {
            throw ConfigError("holiday " + format_date(h) + " falls outside the simulated year");
        }
    }
    Calendar cal;
    cal.start_ = start;
    cal.days_.resize(static_cast<std::size_t>(n_days));
    for (int j = 0; j < n_days; ++j) {
        DayInfo& info = cal.days_[static_cast<std::size_t>(j)];
        const std::int64_t z = z0 + j;
        info.date = civil_from_days(z);
        info.weekday = weekday_from_days(z);
        info.is_weekend = info.weekday == 0 || info.weekday == 6;
        info.season = (info.date.month >= 6 && info.date.month <= 9) ? Season::summer : Season::winter;
        for (const CivilDate& h : holidays) {
            if (h == info.date) info.is_holiday = true;
        }
    }
    return cal;
}

int Calendar::day_index(CivilDate d) const {
    const std::int64_t idx = days_from_civil(d) - days_from_civil(start_);
    if (idx < 0 || idx >= n_days()) return -1;
    return static_cast<int>(idx);
}

std::vector<CivilDate> parse_holiday_lines(const std::string& text, const std::string& origin) {
    std::vector<CivilDate> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        try {
            out.push_back(parse_date(line.substr(begin)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<CivilDate> load_holiday_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open holiday file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_holiday_lines(buf.str(), path);
}

const std::vector<CivilDate>& default_holidays_2011_2012() {
    static const std::vector<CivilDate> holidays = {
        {2011, 11, 11},  // Veterans Day
        {2011, 11, 24},  // Thanksgiving
        {2011, 12, 25},  // Christmas Day (Sunday)
        {2011, 12, 26},  // Christmas Day (observed)
        {2012, 1, 1},    // New Year's Day (Sunday)
        {2012, 1, 2},    // New Year's Day (observed)
        {2012, 1, 16},   // Birthday of Martin Luther King, Jr.
        {2012, 2, 20},   // Washington's Birthday
        {2012, 5, 28},   // Memorial Day
        {2012, 7, 4},    // Independence Day
        {2012, 9, 3},    // Labor Day
        {2012, 10, 8},   // Columbus Day
    };
    return holidays;
}

std::span<const double> HourlySeries::day(int j) const { return slice_day(*this, j); }

std::span<double> HourlySeries::day(int j) {
    auto view = slice_day(*this, j);
    return {v.data() + (view.data() - v.data()), 24};
}

double HourlySeries::sum() const { return std::accumulate(v.begin(), v.end(), 0.0); }

std::span<const double> slice_day(const HourlySeries& s, int j) {
    if (j < 0 || static_cast<std::size_t>(j) * 24 + 24 > s.v.size()) {
        throw DataError("day index " + std::to_string(j) + " out of range for series of " +
                        std::to_string(s.v.size()) + " hours");
    }
    return {s.v.data() + static_cast<std::size_t>(j) * 24, 24};
}

}  // namespace derval
