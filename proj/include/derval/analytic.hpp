#pragma once

#include <vector>

namespace derval {

// One-period, two-type closed-form model of the value of coordinated action.
// Type A households consume e-1 and type B consume e+1; adopters generate e.
struct ToyParams {
    double e = 2.0;    // per-adopter generation, > 1
    double p_a = 0.75; // fraction of type A
    double q = 1.0;    // purchase price
    double r = 0.0;    // sale price, q > r >= 0
    int n = 100;       // household count
    double f = 0.0;    // adoption fraction

    void validate() const;
    // Adoption fraction beyond which the coordinated group is a net exporter.
    double f_star() const { return (1.0 + e - 2.0 * p_a) / e; }
    double t_bl() const { return static_cast<double>(n) * q * (1.0 + e - 2.0 * p_a); }
    // The f_star derivation assumes p_a > 1/2; callers outside that regime
    // should trust only the brute-force enumeration.
    bool in_derived_regime() const { return p_a > 0.5; }
};

double toy_cost_separate(const ToyParams& p);
double toy_cost_coordinated(const ToyParams& p);

struct ToyVca {
    double dollars = 0.0;
    double fraction_of_tbl = 0.0;
    bool exporting = false;  // true on the f > f_star branch
};
ToyVca toy_vca(const ToyParams& p);

// Direct enumeration of all n household bills, with adopters drawn
// proportionally from each type; f*n*p_a and f*n must be integral.
struct ToyBrute {
    double cost_separate = 0.0;
    double cost_coordinated = 0.0;
};
ToyBrute toy_brute(const ToyParams& p);

struct ToyCurvePoint {
    double f;
    double vca;
    double vca_fraction;
    bool exporting;
};
std::vector<ToyCurvePoint> toy_curve(ToyParams p, double f_step);

}  // namespace derval
