#include "derval/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "derval/errors.hpp"

namespace derval {

const char* pattern_name(AdoptionPattern p) {
    switch (p) {
        case AdoptionPattern::forward: return "forward";
        case AdoptionPattern::reverse: return "reverse";
        case AdoptionPattern::random: return "random";
    }
    return "?";
}

AdoptionPattern parse_pattern(const std::string& name) {
    if (name == "forward") return AdoptionPattern::forward;
    if (name == "reverse") return AdoptionPattern::reverse;
    if (name == "random") return AdoptionPattern::random;
    throw ConfigError("unknown adoption pattern '" + name + "'");
}

std::vector<int> rank_households(std::span<const double> s_n, std::span<const std::string> ids,
                                 AdoptionPattern pattern, rng::Key random_key) {
    if (s_n.empty() || s_n.size() != ids.size()) {
        throw DataError("rank_households: empty population or mismatched inputs");
    }
    std::vector<int> order(s_n.size());
    std::iota(order.begin(), order.end(), 0);
    switch (pattern) {
        case AdoptionPattern::forward:
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const std::size_t ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
                if (s_n[ia] != s_n[ib]) return s_n[ia] > s_n[ib];
                return ids[ia] < ids[ib];
            });
            break;
        case AdoptionPattern::reverse:
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const std::size_t ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
                if (s_n[ia] != s_n[ib]) return s_n[ia] < s_n[ib];
                return ids[ia] < ids[ib];
            });
            break;
        case AdoptionPattern::random:
            for (std::size_t i = order.size() - 1; i > 0; --i) {
                const std::size_t j = std::min(
                    i, static_cast<std::size_t>(random_key.u01(i) * static_cast<double>(i + 1)));
                std::swap(order[i], order[j]);
            }
            break;
    }
    return order;
}

std::vector<int> adopters_at(std::span<const int> order, double t_pct) {
    if (t_pct < 0.0 || t_pct > 100.0) throw ConfigError("adoption level must be in [0, 100]");
    const std::size_t count = static_cast<std::size_t>(
        std::floor(static_cast<double>(order.size()) * t_pct / 100.0 + 1e-9));
    return std::vector<int>(order.begin(), order.begin() + std::min(count, order.size()));
}

double ScalingLaw::operator()(double mean_kw) const {
    if (mean_kw <= 0.0) return cv_max;
    return std::clamp(a * std::pow(mean_kw, -b), cv_min, cv_max);
}

void ScalingLaw::validate() const {
    if (!(a >= 0.0) || !(b >= 0.0)) throw ConfigError("scaling law a, b must be >= 0");
    if (!(cv_min >= 0.0) || !(cv_max >= cv_min)) {
        throw ConfigError("scaling law requires 0 <= cv_min <= cv_max");
    }
}

GroupProblem build_group_problem(std::span<const LoadTrace> traces,
                                 std::span<const HourlySeries> pv_by_household,
                                 std::span<const PriceSchedule* const> prices_by_household,
                                 std::span<const DeviceSpec> specs, std::span<const int> adopters,
                                 bool group_self_discharge) {
    const std::size_t n = traces.size();
    if (n == 0 || pv_by_household.size() != n || prices_by_household.size() != n ||
        specs.size() != n) {
        throw DataError("build_group_problem: inconsistent population inputs");
    }
    const std::size_t hours = traces[0].kwh.hours();

    GroupProblem g;
    g.load = HourlySeries(hours, 0.0);
    g.pv_dc = HourlySeries(hours, 0.0);
    g.prices.buy = HourlySeries(hours, 0.0);
    g.prices.sell = HourlySeries(hours, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const HourlySeries& l = traces[i].kwh;
        const PriceSchedule& p = *prices_by_household[i];
        for (std::size_t h = 0; h < hours; ++h) {
            g.load.v[h] += l.v[h];
            g.prices.buy.v[h] += p.buy.v[h];
            g.prices.sell.v[h] += p.sell.v[h];
        }
        g.mean_load_bar += l.mean();
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t h = 0; h < hours; ++h) {
        g.prices.buy.v[h] *= inv_n;
        g.prices.sell.v[h] *= inv_n;
    }
    g.mean_load_bar *= inv_n;

    g.spec = DeviceSpec{};
    g.spec.capacity_kwh = 0.0;
    g.spec.charge_kw = 0.0;
    g.spec.discharge_kw = 0.0;
    for (int idx : adopters) {
        const std::size_t i = static_cast<std::size_t>(idx);
        if (i >= n) throw DataError("build_group_problem: adopter index out of range");
        const HourlySeries& e = pv_by_household[i];
        for (std::size_t h = 0; h < hours; ++h) g.pv_dc.v[h] += e.v[h];
        g.spec.pv_kw += specs[i].pv_kw;
        g.spec.capacity_kwh += specs[i].capacity_kwh;
        g.spec.charge_kw += specs[i].charge_kw;
        g.spec.discharge_kw += specs[i].discharge_kw;
        g.spec.eta_inverter = specs[i].eta_inverter;
        g.spec.eta_charge = specs[i].eta_charge;
        g.spec.eta_discharge = specs[i].eta_discharge;
        g.spec.eta_self_hourly = specs[i].eta_self_hourly;
        g.mean_gen_bar += e.mean();
    }
    g.mean_gen_bar *= inv_n;
    if (!group_self_discharge) g.spec.eta_self_hourly = 1.0;
    return g;
}

}  // namespace derval
