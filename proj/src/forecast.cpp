#include "derval/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "derval/errors.hpp"

namespace derval {

NoiseModel make_noise(double cv, double mean_load, double mean_gen, rng::Key key) {
    if (cv < 0.0) throw ConfigError("forecast cv must be >= 0");
    return NoiseModel{cv * mean_load, cv * mean_gen, key};
}

PerturbedDay perturb_day(std::span<const double> load, std::span<const double> gen,
                         const NoiseModel& noise, int day) {
    PerturbedDay out{};
    for (int h = 0; h < 24; ++h) {
        const std::uint64_t base =
            (static_cast<std::uint64_t>(day) * 24 + static_cast<std::uint64_t>(h)) * 2;
        const double eps = noise.sigma_load == 0.0 ? 0.0 : noise.sigma_load * noise.key.normal(base);
        const double gam = noise.sigma_gen == 0.0 ? 0.0 : noise.sigma_gen * noise.key.normal(base + 1);
        out.load[static_cast<std::size_t>(h)] = std::max(load[static_cast<std::size_t>(h)] + eps, 0.0);
        out.gen[static_cast<std::size_t>(h)] = std::max(gen[static_cast<std::size_t>(h)] + gam, 0.0);
    }
    return out;
}

double realized_cost(std::span<const double> u_planned, std::span<const double> net_load_true,
                     std::span<const double> buy, std::span<const double> sell,
                     const DeviceSpec& spec) {
    const auto g = grid_exchange(u_planned, net_load_true, spec);
    double cost = 0.0;
    for (int h = 0; h < 24; ++h) {
        cost += buy[static_cast<std::size_t>(h)] * std::max(g[static_cast<std::size_t>(h)], 0.0) +
                sell[static_cast<std::size_t>(h)] * std::min(g[static_cast<std::size_t>(h)], 0.0);
    }
    return cost;
}

YearResult run_year_realized(const HourlySeries& load, const HourlySeries& pv_dc,
                             const PriceSchedule& prices, const DeviceSpec& spec,
                             const NoiseModel& noise, SolverKind kind, double tie_break) {
    const std::size_t hours = load.hours();
    if (pv_dc.hours() != hours || prices.buy.hours() != hours || prices.sell.hours() != hours) {
        throw DataError("run_year_realized: series lengths disagree");
    }
    const int n_days = load.days();
    YearResult result;
    result.daily_cost.reserve(static_cast<std::size_t>(n_days));
    result.day_end_state.reserve(static_cast<std::size_t>(n_days));
    double x0 = 0.0;
    for (int j = 0; j < n_days; ++j) {
        const auto l = load.day(j);
        const auto e = pv_dc.day(j);
        const auto q = prices.buy.day(j);
        const auto r = prices.sell.day(j);
        const PerturbedDay forecast = perturb_day(l, e, noise, j);
        const auto n_hat = day_net_load(forecast.load, forecast.gen, spec.eta_inverter);
        DayProblem plan{n_hat, q, r, spec, x0};
        DayDispatch planned;
        try {
            planned = solve_day_with(kind, plan, tie_break);
        } catch (const SolverError& err) {
            throw SolverError("day " + std::to_string(j) + ": " + err.what());
        }
        const auto n_true = day_net_load(l, e, spec.eta_inverter);
        const double cost = realized_cost(planned.u, n_true, q, r, spec);
        result.total_cost += cost;
        result.daily_cost.push_back(cost);
        result.day_end_state.push_back(planned.x[23]);
        x0 = planned.x[23];
    }
    return result;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("linear_fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DataError("linear_fit: degenerate x grid");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - (syy - sxy * sxy / sxx) / syy;
    return fit;
}

VoiResult voi_household(const HourlySeries& load, const HourlySeries& pv_dc,
                        const PriceSchedule& prices, const DeviceSpec& spec, double z,
                        std::span<const double> cv_grid_pct, int n_seeds, rng::Key household_key,
                        SolverKind kind, double tie_break) {
    if (cv_grid_pct.size() < 2) throw ConfigError("voi cv grid needs at least two points");
    if (std::find(cv_grid_pct.begin(), cv_grid_pct.end(), 0.0) == cv_grid_pct.end()) {
        throw ConfigError("voi cv grid must contain 0");
    }
    if (n_seeds < 1) throw ConfigError("voi needs n_seeds >= 1");

    const double mean_load = load.mean();
    const double mean_gen = pv_dc.mean();

    VoiResult out;
    out.cv_pct.assign(cv_grid_pct.begin(), cv_grid_pct.end());
    out.seed_costs.resize(cv_grid_pct.size());
    out.mean_cost.resize(cv_grid_pct.size());

    // Perfect foresight computed through the same realized-cost path so that
    // b-dagger(0) equals b_N bit for bit.
    const NoiseModel zero = make_noise(0.0, mean_load, mean_gen, household_key.child("rep"));
    out.b_n = run_year_realized(load, pv_dc, prices, spec, zero, kind, tie_break).total_cost;

    for (std::size_t k = 0; k < cv_grid_pct.size(); ++k) {
        const double cv = cv_grid_pct[k] / 100.0;
        if (cv == 0.0) {
            out.seed_costs[k].assign(static_cast<std::size_t>(n_seeds), out.b_n);
            out.mean_cost[k] = out.b_n;
            continue;
        }
        out.seed_costs[k].reserve(static_cast<std::size_t>(n_seeds));
        double total = 0.0;
        for (int rep = 0; rep < n_seeds; ++rep) {
            const NoiseModel noise = make_noise(
                cv, mean_load, mean_gen,
                household_key.child("rep").child(static_cast<std::uint64_t>(rep)));
            const double cost =
                run_year_realized(load, pv_dc, prices, spec, noise, kind, tie_break).total_cost;
            out.seed_costs[k].push_back(cost);
            total += cost;
        }
        out.mean_cost[k] = total / static_cast<double>(n_seeds);
    }

    const LinearFit fit = linear_fit(out.cv_pct, out.mean_cost);
    out.slope = fit.slope;
    out.norm_slope = z > 0.0 ? fit.slope / z : 0.0;
    out.r2 = fit.r2;
    return out;
}

}  // namespace derval
