#include "derval/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "derval/errors.hpp"
#include "derval/pwl.hpp"

namespace derval {

SolverKind parse_solver(const std::string& name) {
    if (name == "pwl") return SolverKind::pwl;
    if (name == "simplex") return SolverKind::simplex;
    throw ConfigError("unknown solver '" + name + "' (expected pwl or simplex)");
}

namespace {

void validate_day_problem(const DayProblem& p) {
    if (p.net_load.size() != 24 || p.buy.size() != 24 || p.sell.size() != 24) {
        throw DataError("day problem requires 24-hour vectors");
    }
    for (int h = 0; h < 24; ++h) {
        const double q = p.buy[static_cast<std::size_t>(h)];
        const double r = p.sell[static_cast<std::size_t>(h)];
        if (!(q >= 0.0) || !(r >= 0.0) || r > q + 1e-12) {
            throw DataError("day problem prices must satisfy 0 <= sell <= buy at hour " +
                            std::to_string(h));
        }
    }
    const DeviceSpec& s = p.spec;
    if (s.capacity_kwh < 0.0 || s.charge_kw < 0.0 || s.discharge_kw < 0.0) {
        throw DataError("device limits must be nonnegative");
    }
    if (!(s.eta_inverter > 0.0 && s.eta_inverter <= 1.0) ||
        !(s.eta_charge > 0.0 && s.eta_charge <= 1.0) ||
        !(s.eta_discharge > 0.0 && s.eta_discharge <= 1.0) ||
        !(s.eta_self_hourly > 0.0 && s.eta_self_hourly <= 1.0)) {
        throw DataError("device efficiencies must lie in (0, 1]");
    }
    if (p.x0 < -1e-9 || p.x0 > s.capacity_kwh + 1e-9) {
        throw DataError("initial state outside [0, capacity]");
    }
}

// c_h(u) + tie*|u| as a convex PWL function of the battery action u.
void build_hour_cost(double n, double q, double r, double alpha, double beta, double dis_max,
                     double ch_max, double tie, pwl::Convex& out) {
    out.x_lo = -dis_max;
    out.pieces.clear();

    const double g_lo = n + beta * -dis_max;
    out.y_lo = (g_lo >= 0.0 ? q * g_lo : r * g_lo) + tie * dis_max;

    // Breakpoints: u = 0 (rate asymmetry and tie-break kink) and the u where
    // the grid exchange crosses zero.
    double cuts[2];
    int n_cuts = 0;
    const double u_zero = n >= 0.0 ? -n / beta : -n / alpha;
    if (u_zero > -dis_max && u_zero < ch_max) cuts[n_cuts++] = u_zero;
    if (0.0 > -dis_max && 0.0 < ch_max) cuts[n_cuts++] = 0.0;
    if (n_cuts == 2 && cuts[0] > cuts[1]) std::swap(cuts[0], cuts[1]);
    if (n_cuts == 2 && cuts[0] == cuts[1]) n_cuts = 1;

    double prev = -dis_max;
    for (int k = 0; k <= n_cuts; ++k) {
        const double next = k < n_cuts ? cuts[k] : ch_max;
        if (next > prev) {
            const double mid = 0.5 * (prev + next);
            const double rate = mid >= 0.0 ? alpha : beta;
            const double price = (n + rate * mid) >= 0.0 ? q : r;
            out.pieces.push_back({price * rate + (mid >= 0.0 ? tie : -tie), next - prev});
            prev = next;
        }
    }
}

}  // namespace

std::array<double, 24> grid_exchange(std::span<const double> u, std::span<const double> net_load,
                                     const DeviceSpec& spec) {
    const double alpha = 1.0 / (spec.eta_charge * spec.eta_inverter);
    const double beta = spec.eta_discharge * spec.eta_inverter;
    std::array<double, 24> g{};
    for (std::size_t h = 0; h < 24; ++h) {
        g[h] = net_load[h] + alpha * std::max(u[h], 0.0) + beta * std::min(u[h], 0.0);
    }
    return g;
}

double idle_day_cost(std::span<const double> net_load, std::span<const double> buy,
                     std::span<const double> sell) {
    double cost = 0.0;
    for (std::size_t h = 0; h < net_load.size(); ++h) {
        cost += buy[h] * std::max(net_load[h], 0.0) + sell[h] * std::min(net_load[h], 0.0);
    }
    return cost;
}

std::array<double, 24> day_net_load(std::span<const double> load, std::span<const double> pv_dc,
                                    double eta_inverter) {
    std::array<double, 24> n{};
    for (std::size_t h = 0; h < 24; ++h) n[h] = load[h] - eta_inverter * pv_dc[h];
    return n;
}

DayDispatch solve_day(const DayProblem& p, double tie_break) {
    validate_day_problem(p);
    const DeviceSpec& s = p.spec;
    const double alpha = 1.0 / (s.eta_charge * s.eta_inverter);
    const double beta = s.eta_discharge * s.eta_inverter;
    const double cap = s.capacity_kwh;
    const double eta_s = s.eta_self_hourly;

    // Backward value recursion: values[h] is the optimal cost-to-go as a
    // function of the state at the end of hour h-1 (values[24] of x_23's
    // successor is the zero function).
    thread_local std::vector<pwl::Convex> values;
    thread_local pwl::Convex cost_fn, cost_mirror, conv, scaled;
    values.resize(25);
    values[24] = pwl::Convex::zero(0.0, cap);
    for (int h = 23; h >= 0; --h) {
        build_hour_cost(p.net_load[static_cast<std::size_t>(h)], p.buy[static_cast<std::size_t>(h)],
                        p.sell[static_cast<std::size_t>(h)], alpha, beta, s.discharge_kw,
                        s.charge_kw, tie_break, cost_fn);
        pwl::mirror(cost_fn, cost_mirror);
        pwl::inf_convolve(cost_mirror, values[static_cast<std::size_t>(h) + 1], conv);
        pwl::scale_argument(conv, eta_s, scaled);
        if (h > 0) {
            pwl::restrict_domain(scaled, 0.0, cap, values[static_cast<std::size_t>(h)]);
        } else {
            values[0] = scaled;
        }
    }
    const double planned_objective = values[0].eval(std::clamp(p.x0, 0.0, cap));

    // Forward recovery of the schedule.
    DayDispatch out;
    double x_prev = std::clamp(p.x0, 0.0, cap);
    double objective_check = 0.0;
    for (int h = 0; h < 24; ++h) {
        const double y = eta_s * x_prev;
        const double u_lo = std::max(-s.discharge_kw, -y);
        const double u_hi = std::min(s.charge_kw, cap - y);
        build_hour_cost(p.net_load[static_cast<std::size_t>(h)], p.buy[static_cast<std::size_t>(h)],
                        p.sell[static_cast<std::size_t>(h)], alpha, beta, s.discharge_kw,
                        s.charge_kw, tie_break, cost_fn);
        const double u =
            pwl::argmin_sum(cost_fn, values[static_cast<std::size_t>(h) + 1], y, u_lo, u_hi);
        const double x_next = std::clamp(y + u, 0.0, cap);
        out.u[static_cast<std::size_t>(h)] = u;
        out.x[static_cast<std::size_t>(h)] = x_next;
        const double g = p.net_load[static_cast<std::size_t>(h)] + alpha * std::max(u, 0.0) +
                         beta * std::min(u, 0.0);
        out.g[static_cast<std::size_t>(h)] = g;
        out.cost += p.buy[static_cast<std::size_t>(h)] * std::max(g, 0.0) +
                    p.sell[static_cast<std::size_t>(h)] * std::min(g, 0.0);
        objective_check += tie_break * std::abs(u);
        x_prev = x_next;
    }
    objective_check += out.cost;
    if (std::abs(objective_check - planned_objective) >
        1e-6 + 1e-9 * std::abs(planned_objective)) {
        throw SolverError("dispatch solver inconsistency: forward pass cost " +
                          std::to_string(objective_check) + " vs planned " +
                          std::to_string(planned_objective));
    }
    return out;
}

DayDispatch solve_day_with(SolverKind kind, const DayProblem& p, double tie_break) {
    return kind == SolverKind::pwl ? solve_day(p, tie_break) : solve_day_simplex(p, tie_break);
}

YearResult run_year(const HourlySeries& load, const HourlySeries& pv_dc,
                    const PriceSchedule& prices, const DeviceSpec& spec, SolverKind kind,
                    double tie_break) {
    const std::size_t hours = load.hours();
    if (pv_dc.hours() != hours || prices.buy.hours() != hours || prices.sell.hours() != hours) {
        throw DataError("run_year: series lengths disagree");
    }
    const int n_days = load.days();
    YearResult result;
    result.daily_cost.reserve(static_cast<std::size_t>(n_days));
    result.day_end_state.reserve(static_cast<std::size_t>(n_days));
    double x0 = 0.0;
    for (int j = 0; j < n_days; ++j) {
        const auto n = day_net_load(load.day(j), pv_dc.day(j), spec.eta_inverter);
        DayProblem p{n, prices.buy.day(j), prices.sell.day(j), spec, x0};
        DayDispatch d;
        try {
            d = solve_day_with(kind, p, tie_break);
        } catch (const SolverError& e) {
            throw SolverError("day " + std::to_string(j) + ": " + e.what());
        }
        result.total_cost += d.cost;
        result.daily_cost.push_back(d.cost);
        result.day_end_state.push_back(d.x[23]);
        x0 = d.x[23];
    }
    return result;
}

double baseline_bill(const HourlySeries& load, const HourlySeries& buy) {
    if (load.hours() != buy.hours()) throw DataError("baseline_bill: series lengths disagree");
    double total = 0.0;
    for (std::size_t h = 0; h < load.hours(); ++h) total += load.v[h] * buy.v[h];
    return total;
}

std::vector<double> baseline_daily_costs(const HourlySeries& load, const HourlySeries& buy) {
    if (load.hours() != buy.hours()) throw DataError("baseline_daily_costs: series lengths disagree");
    std::vector<double> daily(static_cast<std::size_t>(load.days()), 0.0);
    for (int j = 0; j < load.days(); ++j) {
        const auto l = load.day(j);
        const auto q = buy.day(j);
        double c = 0.0;
        for (int h = 0; h < 24; ++h) c += l[static_cast<std::size_t>(h)] * q[static_cast<std::size_t>(h)];
        daily[static_cast<std::size_t>(j)] = c;
    }
    return daily;
}

}  // namespace derval
