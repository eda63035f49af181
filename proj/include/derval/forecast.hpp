#pragma once

#include <array>
#include <span>
#include <vector>

#include "derval/dispatch.hpp"
#include "derval/rng.hpp"

namespace derval {

// Forecast-error injection at coefficient-of-variation cv (a fraction):
// additive N(0, (cv*mean)^2) noise, truncated at zero. The underlying
// standard-normal draws depend only on (key, day, hour, stream), so they are
// common random numbers across cv levels.
struct NoiseModel {
    double sigma_load = 0.0;
    double sigma_gen = 0.0;
    rng::Key key;
};

NoiseModel make_noise(double cv, double mean_load, double mean_gen, rng::Key key);

struct PerturbedDay {
    std::array<double, 24> load;
    std::array<double, 24> gen;
};

// l_hat = [l + eps]+, e_hat = [e + gamma]+.
PerturbedDay perturb_day(std::span<const double> load, std::span<const double> gen,
                         const NoiseModel& noise, int day);

// Cost of executing a planned schedule against the true net load:
// [g]+ 'q + [g]- 'r with g implied by the plan.
double realized_cost(std::span<const double> u_planned, std::span<const double> net_load_true,
                     std::span<const double> buy, std::span<const double> sell,
                     const DeviceSpec& spec);

// Year under forecast error: each day is planned on the perturbed net load
// and executed against the truth. The state chain follows the planned
// actions (the state depends only on u, not on the realization).
YearResult run_year_realized(const HourlySeries& load, const HourlySeries& pv_dc,
                             const PriceSchedule& prices, const DeviceSpec& spec,
                             const NoiseModel& noise, SolverKind kind = SolverKind::pwl,
                             double tie_break = kDefaultTieBreak);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Value-of-information sweep for one household.
struct VoiResult {
    std::vector<double> cv_pct;                   // includes 0
    std::vector<double> mean_cost;                // b-dagger averaged over seeds
    std::vector<std::vector<double>> seed_costs;  // [cv index][seed]
    double b_n = 0.0;                             // perfect-foresight bill
    double slope = 0.0;                           // $ per CV percentage point per year
    double norm_slope = 0.0;                      // slope / z
    double r2 = 0.0;
};

VoiResult voi_household(const HourlySeries& load, const HourlySeries& pv_dc,
                        const PriceSchedule& prices, const DeviceSpec& spec, double z,
                        std::span<const double> cv_grid_pct, int n_seeds, rng::Key household_key,
                        SolverKind kind = SolverKind::pwl, double tie_break = kDefaultTieBreak);

}  // namespace derval
