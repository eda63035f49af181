#pragma once

#include <map>
#include <string>
#include <vector>

#include "derval/calendar.hpp"

namespace derval {

enum class PolicyId { P1, P2, P3, P4 };

const char* policy_name(PolicyId p);
PolicyId parse_policy(const std::string& name);

// Paired hourly purchase (buy) and sale (sell) prices for one household-year,
// with sell <= buy enforced elementwise.
struct PriceSchedule {
    HourlySeries buy;
    HourlySeries sell;
};

// Seasonal two-level rate parameters, $/kWh.
struct TouLevels {
    double summer_peak;
    double summer_off;
    double winter_peak;
    double winter_off;
};

// PG&E E-TOU Option B levels.
inline constexpr TouLevels kRetailTouLevels{0.35817, 0.25511, 0.22071, 0.20191};
// Speculative worst case for PV: off-peak during 9am-3pm, summer cheaper.
inline constexpr TouLevels kFlippedTouLevels{0.25, 0.15, 0.30, 0.20};
inline constexpr double kSellDiscountFactor = 0.8;

// Peak 4pm-9pm on non-holiday weekdays; off-peak otherwise.
HourlySeries build_retail_tou(const Calendar& cal, const TouLevels& levels = kRetailTouLevels);

// Off-peak 9am-3pm every day of the year; peak all other hours.
HourlySeries build_flipped_tou(const Calendar& cal, const TouLevels& levels = kFlippedTouLevels);

HourlySeries discount_schedule(const HourlySeries& prices, double factor);

// Per-day scaling of wholesale prices so that total revenue on the inflexible
// load matches the retail TOU revenue, day by day.
struct DynamicRates {
    std::map<std::string, HourlySeries> by_zip;
    std::vector<double> day_scale;  // R_tou(j) / R_w(j)
};
DynamicRates build_dynamic(const HourlySeries& tou,
                           const std::map<std::string, HourlySeries>& wholesale_by_zip,
                           const std::vector<LoadTrace>& loads, const Calendar& cal);

// All rate series needed to assemble the four policies.
struct RateLibrary {
    HourlySeries retail_tou;
    HourlySeries flipped_tou;
    std::map<std::string, HourlySeries> wholesale_by_zip;
    std::map<std::string, HourlySeries> dynamic_by_zip;
    std::vector<double> dynamic_day_scale;
};

// Policy table: P1 = TOU / wholesale, P2 = dynamic / 0.8*dynamic,
// P3 = TOU / 0.8*TOU, P4 = flipped / no selling. The sale price is capped at
// the purchase price in every hour.
PriceSchedule assemble_policy(PolicyId policy, const std::string& zip, const RateLibrary& lib);

// Revenue of a price series over the given loads (used for the flipped-TOU
// revenue-neutrality report).
double revenue_on_loads(const HourlySeries& prices, const std::vector<LoadTrace>& loads);

}  // namespace derval
