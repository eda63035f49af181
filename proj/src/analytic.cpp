#include "derval/analytic.hpp"

#include <cmath>
#include <string>

#include "derval/errors.hpp"

namespace derval {

void ToyParams::validate() const {
    if (!(e > 1.0)) throw ConfigError("toy model requires e > 1");
    if (!(p_a >= 0.0 && p_a <= 1.0)) throw ConfigError("toy model requires p_a in [0, 1]");
    if (!(q > r)) throw ConfigError("toy model requires q > r");
    if (!(r >= 0.0)) throw ConfigError("toy model requires r >= 0");
    if (n < 1) throw ConfigError("toy model requires n >= 1");
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("toy model requires f in [0, 1]");
}

double toy_cost_separate(const ToyParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    return (1.0 - p.f) * n * p.q * (p.e + 1.0 - 2.0 * p.p_a) +
           p.f * n * ((1.0 - p.p_a) * p.q - p.p_a * p.r);
}

double toy_cost_coordinated(const ToyParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    const double net = 1.0 + p.e - 2.0 * p.p_a - p.f * p.e;  // group net position / N
    const double price = p.f <= p.f_star() ? p.q : p.r;
    return net * n * price;
}

ToyVca toy_vca(const ToyParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    ToyVca out;
    out.exporting = p.f > p.f_star();
    if (!out.exporting) {
        out.dollars = p.f * n * p.p_a * (p.q - p.r);
        out.fraction_of_tbl = p.f * p.p_a / (1.0 + p.e - 2.0 * p.p_a) * (1.0 - p.r / p.q);
    } else {
        out.dollars = n * (1.0 + p.e - 2.0 * p.p_a - p.f * (p.e - p.p_a)) * (p.q - p.r);
        out.fraction_of_tbl =
            (1.0 - p.f * (p.e - p.p_a) / (1.0 + p.e - 2.0 * p.p_a)) * (1.0 - p.r / p.q);
    }
    return out;
}

namespace {

long integral_count(double v, const char* what) {
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-9) {
        throw ConfigError(std::string("toy_brute requires an integral ") + what + ", got " +
                          std::to_string(v));
    }
    return static_cast<long>(rounded);
}

}  // namespace

ToyBrute toy_brute(const ToyParams& p) {
    p.validate();
    const long n_a = integral_count(p.p_a * p.n, "type-A count");
    const long n_b = p.n - n_a;
    const long adopt_a = integral_count(p.f * static_cast<double>(n_a), "type-A adopter count");
    const long adopt_b = integral_count(p.f * static_cast<double>(n_b), "type-B adopter count");

    ToyBrute out;
    double group_net = 0.0;  // total load minus total adopter generation
    for (long i = 0; i < n_a; ++i) {
        const bool adopted = i < adopt_a;
        const double load = p.e - 1.0;
        out.cost_separate += adopted ? -p.r : p.q * load;  // adopter sells its surplus of 1
        group_net += load - (adopted ? p.e : 0.0);
    }
    for (long i = 0; i < n_b; ++i) {
        const bool adopted = i < adopt_b;
        const double load = p.e + 1.0;
        out.cost_separate += adopted ? p.q : p.q * load;  // adopter still buys its shortfall of 1
        group_net += load - (adopted ? p.e : 0.0);
    }
    out.cost_coordinated = group_net >= 0.0 ? p.q * group_net : p.r * group_net;
    return out;
}

std::vector<ToyCurvePoint> toy_curve(ToyParams p, double f_step) {
    if (!(f_step > 0.0 && f_step <= 1.0)) throw ConfigError("toy curve f_step must be in (0, 1]");
    std::vector<ToyCurvePoint> out;
    const int steps = static_cast<int>(std::round(1.0 / f_step));
    for (int k = 0; k <= steps; ++k) {
        p.f = std::min(1.0, static_cast<double>(k) * f_step);
        const ToyVca v = toy_vca(p);
        out.push_back(ToyCurvePoint{p.f, v.dollars, v.fraction_of_tbl, v.exporting});
    }
    return out;
}

}  // namespace derval
