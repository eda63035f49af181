#pragma once

#include <span>
#include <string>
#include <vector>

#include "derval/rng.hpp"
#include "derval/tariffs.hpp"

namespace derval {

// Average ranks for ties, then Pearson on the rank vectors.
double spearman(std::span<const double> x, std::span<const double> y);

std::vector<double> average_ranks(std::span<const double> x);

// Percentile bootstrap over the days of the year: resample Y days with
// replacement B times, sum each resample, take the alpha/2 and 1-alpha/2
// quantiles of the resampled annual totals.
struct BootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
};
BootstrapCi bootstrap_ci(std::span<const double> daily, int b, double alpha, rng::Key key);

// Linear-interpolation quantile of a sorted copy of v at probability p.
double quantile(std::vector<double> v, double p);

struct SavingsRecord {
    std::string household_id;
    PolicyId policy = PolicyId::P1;
    double z = 0.0;
    double b_bl = 0.0;
    double b_n = 0.0;
    double s_a = 0.0;  // b_bl - b_n
    double s_n = 0.0;  // s_a / z
    BootstrapCi s_a_ci;
    BootstrapCi s_n_ci;
};

// Record assembly with bootstrap CIs from per-day baseline and dispatch
// costs.
SavingsRecord make_savings_record(std::string household_id, PolicyId policy, double z,
                                  std::span<const double> baseline_daily,
                                  std::span<const double> dispatch_daily, int bootstrap_b,
                                  double alpha, rng::Key key);

}  // namespace derval
