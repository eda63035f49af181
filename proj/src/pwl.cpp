#include "derval/pwl.hpp"

#include <algorithm>
#include <cmath>

namespace derval::pwl {

namespace {
constexpr double kSlopeTol = 1e-12;
}

double Convex::x_hi() const {
    double x = x_lo;
    for (const Piece& p : pieces) x += p.width;
    return x;
}

double Convex::eval(double x) const {
    double pos = x_lo;
    double y = y_lo;
    double rem = std::max(0.0, x - x_lo);
    for (const Piece& p : pieces) {
        const double step = std::min(rem, p.width);
        y += p.slope * step;
        rem -= step;
        pos += p.width;
        if (rem <= 0.0) break;
    }
    return y;
}

Convex Convex::zero(double lo, double hi) {
    Convex f;
    f.x_lo = lo;
    f.y_lo = 0.0;
    if (hi > lo) f.pieces.push_back({0.0, hi - lo});
    return f;
}

void inf_convolve(const Convex& f, const Convex& g, Convex& out) {
    out.x_lo = f.x_lo + g.x_lo;
    out.y_lo = f.y_lo + g.y_lo;
    out.pieces.clear();
    out.pieces.reserve(f.pieces.size() + g.pieces.size());
    std::size_t i = 0, j = 0;
    while (i < f.pieces.size() || j < g.pieces.size()) {
        const bool take_f = j >= g.pieces.size() ||
                            (i < f.pieces.size() && f.pieces[i].slope <= g.pieces[j].slope);
        out.pieces.push_back(take_f ? f.pieces[i++] : g.pieces[j++]);
    }
}

void scale_argument(const Convex& f, double s, Convex& out) {
    out.x_lo = f.x_lo / s;
    out.y_lo = f.y_lo;
    out.pieces.clear();
    out.pieces.reserve(f.pieces.size());
    for (const Convex::Piece& p : f.pieces) out.pieces.push_back({p.slope * s, p.width / s});
}

void restrict_domain(const Convex& f, double lo, double hi, Convex& out) {
    out.x_lo = lo;
    out.y_lo = f.eval(lo);
    out.pieces.clear();
    double pos = f.x_lo;
    for (const Convex::Piece& p : f.pieces) {
        const double seg_lo = std::max(pos, lo);
        const double seg_hi = std::min(pos + p.width, hi);
        if (seg_hi > seg_lo) out.pieces.push_back({p.slope, seg_hi - seg_lo});
        pos += p.width;
        if (pos >= hi) break;
    }
}

void mirror(const Convex& f, Convex& out) {
    out.x_lo = -f.x_hi();
    out.y_lo = f.eval(f.x_hi());
    out.pieces.clear();
    out.pieces.reserve(f.pieces.size());
    for (auto it = f.pieces.rbegin(); it != f.pieces.rend(); ++it) {
        out.pieces.push_back({-it->slope, it->width});
    }
}

double argmin_sum(const Convex& f, const Convex& g, double y, double u_lo, double u_hi) {
    if (u_hi <= u_lo) return u_lo;

    // Walk the merged breakpoints of u -> f(u) and u -> g(y+u) from the left,
    // tracking the combined slope. The minimizer set of the convex sum is the
    // closure of the region where the slope crosses zero.
    std::size_t fi = 0, gi = 0;
    double f_end = f.x_lo;  // right edge in u-coordinates of piece fi-1
    while (fi < f.pieces.size() && f_end + f.pieces[fi].width <= u_lo) f_end += f.pieces[fi++].width;
    double g_end = g.x_lo - y;
    while (gi < g.pieces.size() && g_end + g.pieces[gi].width <= u_lo) g_end += g.pieces[gi++].width;

    double cur = u_lo;
    double plateau_start = u_hi;
    bool in_plateau = false;
    while (cur < u_hi) {
        const double f_next = fi < f.pieces.size() ? f_end + f.pieces[fi].width : u_hi;
        const double g_next = gi < g.pieces.size() ? g_end + g.pieces[gi].width : u_hi;
        const double seg_end = std::min({f_next, g_next, u_hi});
        const double fs = fi < f.pieces.size() ? f.pieces[fi].slope
                                               : (f.pieces.empty() ? 0.0 : f.pieces.back().slope);
        const double gs = gi < g.pieces.size() ? g.pieces[gi].slope
                                               : (g.pieces.empty() ? 0.0 : g.pieces.back().slope);
        const double slope = fs + gs;
        if (slope > kSlopeTol) {
            const double a = in_plateau ? plateau_start : cur;
            const double b = cur;
            return std::clamp(0.0, a, b);
        }
        if (slope >= -kSlopeTol) {
            if (!in_plateau) {
                plateau_start = cur;
                in_plateau = true;
            }
        } else {
            in_plateau = false;
        }
        cur = seg_end;
        if (seg_end >= f_next && fi < f.pieces.size()) f_end += f.pieces[fi++].width;
        if (seg_end >= g_next && gi < g.pieces.size()) g_end += g.pieces[gi++].width;
    }
    const double a = in_plateau ? plateau_start : u_hi;
    return std::clamp(0.0, a, u_hi);
}

}  // namespace derval::pwl
