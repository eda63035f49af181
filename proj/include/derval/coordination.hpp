#pragma once

#include <span>
#include <string>
#include <vector>

#include "derval/dispatch.hpp"
#include "derval/rng.hpp"

namespace derval {

enum class AdoptionPattern { forward, reverse, random };
const char* pattern_name(AdoptionPattern p);
AdoptionPattern parse_pattern(const std::string& name);

// Ordering positions by pattern: forward sorts by decreasing normalized
// savings, reverse by increasing; ties break by household id ascending.
// Random is a seeded permutation.
std::vector<int> rank_households(std::span<const double> s_n, std::span<const std::string> ids,
                                 AdoptionPattern pattern, rng::Key random_key);

// First floor(N * t / 100) households of the ordering.
std::vector<int> adopters_at(std::span<const int> order, double t_pct);

// CV scaling law for aggregate forecasts: w(x) = clamp(a*x^-b, cv_min, cv_max).
// The parameters default to flagged placeholders; the referenced external fit
// is configuration.
struct ScalingLaw {
    double a = 0.25;
    double b = 0.33;
    double cv_min = 0.01;
    double cv_max = 1.0;

    double operator()(double mean_kw) const;
    void validate() const;
};

// The coordinator's aggregated problem at one adoption state: total load of
// all households, adopters' PV and summed storage, mean prices.
struct GroupProblem {
    HourlySeries load;
    HourlySeries pv_dc;
    PriceSchedule prices;
    DeviceSpec spec;
    double mean_load_bar = 0.0;  // (1/N) sum of household mean hourly loads
    double mean_gen_bar = 0.0;   // (1/N) sum of adopter mean hourly generation
};

GroupProblem build_group_problem(std::span<const LoadTrace> traces,
                                 std::span<const HourlySeries> pv_by_household,
                                 std::span<const PriceSchedule* const> prices_by_household,
                                 std::span<const DeviceSpec> specs, std::span<const int> adopters,
                                 bool group_self_discharge);

}  // namespace derval
