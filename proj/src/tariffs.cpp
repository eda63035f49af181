#include "derval/tariffs.hpp"

#include <algorithm>

#include "derval/errors.hpp"

namespace derval {

const char* policy_name(PolicyId p) {
    switch (p) {
        case PolicyId::P1: return "P1";
        case PolicyId::P2: return "P2";
        case PolicyId::P3: return "P3";
        case PolicyId::P4: return "P4";
    }
    return "?";
}

PolicyId parse_policy(const std::string& name) {
    if (name == "P1" || name == "p1" || name == "1") return PolicyId::P1;
    if (name == "P2" || name == "p2" || name == "2") return PolicyId::P2;
    if (name == "P3" || name == "p3" || name == "3") return PolicyId::P3;
    if (name == "P4" || name == "p4" || name == "4") return PolicyId::P4;
    throw ConfigError("unknown policy '" + name + "' (expected P1..P4)");
}

HourlySeries build_retail_tou(const Calendar& cal, const TouLevels& levels) {
    HourlySeries out(cal.hours());
    for (int j = 0; j < cal.n_days(); ++j) {
        const bool summer = cal.day(j).season == Season::summer;
        const bool peak_day = cal.peak_eligible(j);
        auto day = out.day(j);
        for (int h = 0; h < 24; ++h) {
            const bool peak = peak_day && h >= 16 && h < 21;
            day[static_cast<std::size_t>(h)] =
                summer ? (peak ? levels.summer_peak : levels.summer_off)
                       : (peak ? levels.winter_peak : levels.winter_off);
        }
    }
    return out;
}

HourlySeries build_flipped_tou(const Calendar& cal, const TouLevels& levels) {
    HourlySeries out(cal.hours());
    for (int j = 0; j < cal.n_days(); ++j) {
        const bool summer = cal.day(j).season == Season::summer;
        auto day = out.day(j);
        for (int h = 0; h < 24; ++h) {
            const bool off_peak = h >= 9 && h < 15;
            day[static_cast<std::size_t>(h)] =
                summer ? (off_peak ? levels.summer_off : levels.summer_peak)
                       : (off_peak ? levels.winter_off : levels.winter_peak);
        }
    }
    return out;
}

HourlySeries discount_schedule(const HourlySeries& prices, double factor) {
    if (factor < 0.0 || factor > 1.0) {
        throw ConfigError("discount factor must be in [0, 1], got " + std::to_string(factor));
    }
    HourlySeries out(prices.hours());
    for (std::size_t h = 0; h < prices.hours(); ++h) out.v[h] = factor * prices.v[h];
    return out;
}

DynamicRates build_dynamic(const HourlySeries& tou,
                           const std::map<std::string, HourlySeries>& wholesale_by_zip,
                           const std::vector<LoadTrace>& loads, const Calendar& cal) {
    for (const LoadTrace& t : loads) {
        if (!wholesale_by_zip.count(t.zip)) {
            throw DataError("no wholesale price series for zip " + t.zip + " (household " +
                            t.household_id + ")");
        }
    }
    const int n_days = cal.n_days();
    DynamicRates out;
    out.day_scale.assign(static_cast<std::size_t>(n_days), 0.0);
    for (int j = 0; j < n_days; ++j) {
        double rev_tou = 0.0, rev_w = 0.0;
        const auto tou_day = tou.day(j);
        for (const LoadTrace& t : loads) {
            const auto l = t.kwh.day(j);
            const auto w = wholesale_by_zip.at(t.zip).day(j);
            for (int h = 0; h < 24; ++h) {
                rev_tou += l[static_cast<std::size_t>(h)] * tou_day[static_cast<std::size_t>(h)];
                rev_w += l[static_cast<std::size_t>(h)] * w[static_cast<std::size_t>(h)];
            }
        }
        if (rev_w <= 0.0) {
            throw DataError("dynamic rate undefined: wholesale revenue is zero on day " +
                            std::to_string(j) + " (" + format_date(cal.day(j).date) + ")");
        }
        out.day_scale[static_cast<std::size_t>(j)] = rev_tou / rev_w;
    }
    for (const auto& [zip, w] : wholesale_by_zip) {
        HourlySeries dyn(w.hours());
        for (int j = 0; j < n_days; ++j) {
            const double s = out.day_scale[static_cast<std::size_t>(j)];
            auto src = w.day(j);
            auto dst = dyn.day(j);
            for (int h = 0; h < 24; ++h) dst[static_cast<std::size_t>(h)] = s * src[static_cast<std::size_t>(h)];
        }
        out.by_zip.emplace(zip, std::move(dyn));
    }
    return out;
}

namespace {

PriceSchedule cap_sell(HourlySeries buy, HourlySeries sell) {
    for (std::size_t h = 0; h < buy.hours(); ++h) {
        sell.v[h] = std::min(sell.v[h], buy.v[h]);
    }
    return PriceSchedule{std::move(buy), std::move(sell)};
}

const HourlySeries& zip_series(const std::map<std::string, HourlySeries>& m, const std::string& zip,
                               const char* what) {
    auto it = m.find(zip);
    if (it == m.end()) throw DataError(std::string(what) + " series missing for zip " + zip);
    return it->second;
}

}  // namespace

PriceSchedule assemble_policy(PolicyId policy, const std::string& zip, const RateLibrary& lib) {
    switch (policy) {
        case PolicyId::P1:
            return cap_sell(lib.retail_tou, zip_series(lib.wholesale_by_zip, zip, "wholesale"));
        case PolicyId::P2: {
            const HourlySeries& dyn = zip_series(lib.dynamic_by_zip, zip, "dynamic");
            return cap_sell(dyn, discount_schedule(dyn, kSellDiscountFactor));
        }
        case PolicyId::P3:
            return cap_sell(lib.retail_tou, discount_schedule(lib.retail_tou, kSellDiscountFactor));
        case PolicyId::P4:
            return cap_sell(lib.flipped_tou, HourlySeries(lib.flipped_tou.hours(), 0.0));
    }
    throw ConfigError("unknown policy id");
}

double revenue_on_loads(const HourlySeries& prices, const std::vector<LoadTrace>& loads) {
    double total = 0.0;
    for (const LoadTrace& t : loads) {
        for (std::size_t h = 0; h < t.kwh.hours(); ++h) total += t.kwh.v[h] * prices.v[h];
    }
    return total;
}

}  // namespace derval
