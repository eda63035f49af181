#pragma once

#include <array>
#include <span>
#include <vector>

#include "derval/device.hpp"
#include "derval/tariffs.hpp"

namespace derval {

// Throughput penalty ($/kWh) that makes the optimal schedule unique across
// solver backends; reported costs exclude it.
inline constexpr double kDefaultTieBreak = 1e-7;

enum class SolverKind { pwl, simplex };
SolverKind parse_solver(const std::string& name);

// One day of storage scheduling: minimize sum_h q_h*[g_h]+ + r_h*[g_h]- with
//   g = n + u+/(eta_C*eta_I) - (eta_D*eta_I)*u-
//   -discharge_kw <= u <= charge_kw, 0 <= x <= capacity,
//   x_h = eta_S*x_{h-1} + u_h, x_0 given.
struct DayProblem {
    std::span<const double> net_load;  // n, kWh, length 24
    std::span<const double> buy;       // q, $/kWh
    std::span<const double> sell;      // r, $/kWh
    DeviceSpec spec;
    double x0 = 0.0;
};

struct DayDispatch {
    std::array<double, 24> u{};  // signed battery action, kWh into the state
    std::array<double, 24> x{};  // state at the end of each hour
    std::array<double, 24> g{};  // grid exchange, kWh (positive = import)
    double cost = 0.0;           // $, excludes the tie-break penalty
};

// Exact solution via a convex piecewise-linear value-function recursion over
// the single state dimension.
DayDispatch solve_day(const DayProblem& p, double tie_break = kDefaultTieBreak);

// Raw split variables from the simplex formulation, for invariant checks.
struct SplitDiagnostics {
    std::array<double, 24> u_charge{}, u_discharge{}, g_import{}, g_export{};
};

// Reference solution via a dense bounded-variable primal simplex on the split
// formulation (u+, u-, g+, g-, x). Kept for cross-checking; much slower.
DayDispatch solve_day_simplex(const DayProblem& p, double tie_break = kDefaultTieBreak,
                              SplitDiagnostics* split = nullptr);

DayDispatch solve_day_with(SolverKind kind, const DayProblem& p, double tie_break = kDefaultTieBreak);

// Grid exchange implied by a (not necessarily optimal) action sequence.
std::array<double, 24> grid_exchange(std::span<const double> u, std::span<const double> net_load,
                                     const DeviceSpec& spec);

// Cost of a day with the battery idle.
double idle_day_cost(std::span<const double> net_load, std::span<const double> buy,
                     std::span<const double> sell);

// n = l - eta_I * e for one day.
std::array<double, 24> day_net_load(std::span<const double> load, std::span<const double> pv_dc,
                                    double eta_inverter);

struct YearResult {
    double total_cost = 0.0;          // b_N
    std::vector<double> daily_cost;   // c^(j)
    std::vector<double> day_end_state;
};

// Solves day 0..Y-1 sequentially; x0 is 0 on the first day and the prior
// day's terminal state afterwards.
YearResult run_year(const HourlySeries& load, const HourlySeries& pv_dc,
                    const PriceSchedule& prices, const DeviceSpec& spec,
                    SolverKind kind = SolverKind::pwl, double tie_break = kDefaultTieBreak);

// b_BL = L'Q.
double baseline_bill(const HourlySeries& load, const HourlySeries& buy);

// Per-day baseline costs, for bootstrap resampling.
std::vector<double> baseline_daily_costs(const HourlySeries& load, const HourlySeries& buy);

}  // namespace derval
