#include "derval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "derval/errors.hpp"

namespace derval {

std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("spearman needs two equal vectors of size >= 2");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("spearman: zero rank variance");
    return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw DataError("quantile of empty vector");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - std::floor(pos);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

BootstrapCi bootstrap_ci(std::span<const double> daily, int b, double alpha, rng::Key key) {
    if (daily.size() < 2) throw DataError("bootstrap_ci needs >= 2 days");
    if (b < 1) throw DataError("bootstrap_ci needs >= 1 resample");
    const std::size_t y = daily.size();
    std::vector<double> totals(static_cast<std::size_t>(b), 0.0);
    for (int rep = 0; rep < b; ++rep) {
        double total = 0.0;
        const std::uint64_t base = static_cast<std::uint64_t>(rep) * y;
        for (std::size_t j = 0; j < y; ++j) {
            const std::size_t pick = std::min(
                y - 1, static_cast<std::size_t>(key.u01(base + j) * static_cast<double>(y)));
            total += daily[pick];
        }
        totals[static_cast<std::size_t>(rep)] = total;
    }
    return BootstrapCi{quantile(totals, alpha / 2.0), quantile(std::move(totals), 1.0 - alpha / 2.0)};
}

SavingsRecord make_savings_record(std::string household_id, PolicyId policy, double z,
                                  std::span<const double> baseline_daily,
                                  std::span<const double> dispatch_daily, int bootstrap_b,
                                  double alpha, rng::Key key) {
    if (baseline_daily.size() != dispatch_daily.size()) {
        throw DataError("savings record: daily cost vectors disagree");
    }
    SavingsRecord rec;
    rec.household_id = std::move(household_id);
    rec.policy = policy;
    rec.z = z;
    std::vector<double> daily_savings(baseline_daily.size());
    for (std::size_t j = 0; j < baseline_daily.size(); ++j) {
        rec.b_bl += baseline_daily[j];
        rec.b_n += dispatch_daily[j];
        daily_savings[j] = baseline_daily[j] - dispatch_daily[j];
    }
    rec.s_a = rec.b_bl - rec.b_n;
    rec.s_n = z > 0.0 ? rec.s_a / z : 0.0;
    rec.s_a_ci = bootstrap_ci(daily_savings, bootstrap_b, alpha, key);
    rec.s_n_ci = z > 0.0 ? BootstrapCi{rec.s_a_ci.lo / z, rec.s_a_ci.hi / z} : BootstrapCi{};
    return rec;
}

}  // namespace derval
