#pragma once

#include <vector>

namespace derval::pwl {

// Convex piecewise-linear function on a closed interval. Stored as the value
// at the left endpoint plus (slope, width) pieces in left-to-right order;
// convexity means the slopes are nondecreasing.
struct Convex {
    struct Piece {
        double slope;
        double width;
    };

    double x_lo = 0.0;
    double y_lo = 0.0;
    std::vector<Piece> pieces;

    double x_hi() const;
    double eval(double x) const;  // x clamped into the domain

    static Convex zero(double lo, double hi);
};

// (f [] g)(y) = min_{a+b=y} f(a) + g(b). For convex PWL inputs this is a
// merge of the two slope-sorted piece lists.
void inf_convolve(const Convex& f, const Convex& g, Convex& out);

// out(x) = f(s*x), s > 0.
void scale_argument(const Convex& f, double s, Convex& out);

// Restrict f to [lo, hi], which must lie inside f's domain (up to roundoff).
void restrict_domain(const Convex& f, double lo, double hi, Convex& out);

// out(a) = f(-a).
void mirror(const Convex& f, Convex& out);

// Minimize f(u) + g(y + u) over u in [u_lo, u_hi] (an interval on which both
// terms are defined). Returns the minimizer nearest to zero.
double argmin_sum(const Convex& f, const Convex& g, double y, double u_lo, double u_hi);

}  // namespace derval::pwl
