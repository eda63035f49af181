// Dense bounded-variable primal simplex for the daily dispatch LP, kept as a
// serial reference implementation for the fast value-function solver.
//
// Variables (per hour h): u+ , u-, g+, g-, x — 120 columns, 48 equality rows:
//   balance: g+ - g- - alpha*u+ + beta*u- = n_h
//   state:   x_h - eta_S*x_{h-1} - u+_h + u-_h = [h==0] * eta_S * x0
// The all-idle point provides a starting basis (x plus one of g+/g- per hour),
// so no phase-1 is needed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "derval/dispatch.hpp"
#include "derval/errors.hpp"

namespace derval {

namespace {

constexpr int kHours = 24;
constexpr int kRows = 48;
constexpr int kCols = 120;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

inline int col_uc(int h) { return h; }
inline int col_ud(int h) { return 24 + h; }
inline int col_gp(int h) { return 48 + h; }
inline int col_gn(int h) { return 72 + h; }
inline int col_x(int h) { return 96 + h; }

enum class VarStatus : unsigned char { basic, at_lower, at_upper };

struct Tableau {
    // Column-major sparse-ish storage would be overkill at this size.
    std::vector<double> a;  // kRows x kCols, row-major
    std::vector<double> b;
    std::vector<double> cost;
    std::vector<double> lower, upper;

    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * kCols + c]; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * kCols + c]; }
};

// LU factorization with partial pivoting of the 48x48 basis matrix.
struct BasisLu {
    std::vector<double> lu;  // kRows x kRows
    std::vector<int> perm;

    double at(int r, int c) const { return lu[static_cast<std::size_t>(r) * kRows + c]; }
    double& at(int r, int c) { return lu[static_cast<std::size_t>(r) * kRows + c]; }

    bool factor(const Tableau& t, const std::vector<int>& basic) {
        lu.assign(static_cast<std::size_t>(kRows) * kRows, 0.0);
        perm.resize(kRows);
        for (int r = 0; r < kRows; ++r) {
            for (int k = 0; k < kRows; ++k) at(r, k) = t.at(r, basic[static_cast<std::size_t>(k)]);
            perm[static_cast<std::size_t>(r)] = r;
        }
        for (int k = 0; k < kRows; ++k) {
            int piv = k;
            double best = std::abs(at(k, k));
            for (int r = k + 1; r < kRows; ++r) {
                if (std::abs(at(r, k)) > best) {
                    best = std::abs(at(r, k));
                    piv = r;
                }
            }
            if (best < kPivotTol) return false;
            if (piv != k) {
                for (int c = 0; c < kRows; ++c) std::swap(at(piv, c), at(k, c));
                std::swap(perm[static_cast<std::size_t>(piv)], perm[static_cast<std::size_t>(k)]);
            }
            const double inv = 1.0 / at(k, k);
            for (int r = k + 1; r < kRows; ++r) {
                const double f = at(r, k) * inv;
                at(r, k) = f;
                if (f != 0.0) {
                    for (int c = k + 1; c < kRows; ++c) at(r, c) -= f * at(k, c);
                }
            }
        }
        return true;
    }

    // Solve B * out = rhs.
    void solve(const double* rhs, double* out) const {
        double y[kRows];
        for (int r = 0; r < kRows; ++r) y[r] = rhs[perm[static_cast<std::size_t>(r)]];
        for (int r = 0; r < kRows; ++r) {
            for (int c = 0; c < r; ++c) y[r] -= at(r, c) * y[c];
        }
        for (int r = kRows - 1; r >= 0; --r) {
            for (int c = r + 1; c < kRows; ++c) y[r] -= at(r, c) * y[c];
            y[r] /= at(r, r);
        }
        std::copy(y, y + kRows, out);
    }

    // Solve B' * out = rhs.
    void solve_transposed(const double* rhs, double* out) const {
        double y[kRows];
        std::copy(rhs, rhs + kRows, y);
        for (int r = 0; r < kRows; ++r) {
            for (int c = 0; c < r; ++c) y[r] -= at(c, r) * y[c];
            y[r] /= at(r, r);
        }
        for (int r = kRows - 1; r >= 0; --r) {
            for (int c = r + 1; c < kRows; ++c) y[r] -= at(c, r) * y[c];
        }
        for (int r = 0; r < kRows; ++r) out[perm[static_cast<std::size_t>(r)]] = y[r];
    }
};

}  // namespace

DayDispatch solve_day_simplex(const DayProblem& p, double tie_break, SplitDiagnostics* split) {
    const DeviceSpec& s = p.spec;
    const double alpha = 1.0 / (s.eta_charge * s.eta_inverter);
    const double beta = s.eta_discharge * s.eta_inverter;
    const double eta_s = s.eta_self_hourly;
    const double x0 = std::clamp(p.x0, 0.0, s.capacity_kwh);

    Tableau t;
    t.a.assign(static_cast<std::size_t>(kRows) * kCols, 0.0);
    t.b.assign(kRows, 0.0);
    t.cost.assign(kCols, 0.0);
    t.lower.assign(kCols, 0.0);
    t.upper.assign(kCols, kInf);

    for (int h = 0; h < kHours; ++h) {
        const int balance = h;
        const int state = kHours + h;
        t.at(balance, col_gp(h)) = 1.0;
        t.at(balance, col_gn(h)) = -1.0;
        t.at(balance, col_uc(h)) = -alpha;
        t.at(balance, col_ud(h)) = beta;
        t.b[static_cast<std::size_t>(balance)] = p.net_load[static_cast<std::size_t>(h)];

        t.at(state, col_x(h)) = 1.0;
        t.at(state, col_uc(h)) = -1.0;
        t.at(state, col_ud(h)) = 1.0;
        if (h == 0) {
            t.b[static_cast<std::size_t>(state)] = eta_s * x0;
        } else {
            t.at(state, col_x(h - 1)) = -eta_s;
        }

        t.cost[static_cast<std::size_t>(col_uc(h))] = tie_break;
        t.cost[static_cast<std::size_t>(col_ud(h))] = tie_break;
        t.cost[static_cast<std::size_t>(col_gp(h))] = p.buy[static_cast<std::size_t>(h)];
        t.cost[static_cast<std::size_t>(col_gn(h))] = -p.sell[static_cast<std::size_t>(h)];
        t.upper[static_cast<std::size_t>(col_uc(h))] = s.charge_kw;
        t.upper[static_cast<std::size_t>(col_ud(h))] = s.discharge_kw;
        t.upper[static_cast<std::size_t>(col_x(h))] = s.capacity_kwh;
    }

    // Starting basis: all x plus, per hour, whichever of g+/g- carries the
    // idle net load.
    std::vector<int> basic;
    std::vector<VarStatus> status(kCols, VarStatus::at_lower);
    basic.reserve(kRows);
    for (int h = 0; h < kHours; ++h) {
        basic.push_back(p.net_load[static_cast<std::size_t>(h)] >= 0.0 ? col_gp(h) : col_gn(h));
    }
    for (int h = 0; h < kHours; ++h) basic.push_back(col_x(h));
    for (int c : basic) status[static_cast<std::size_t>(c)] = VarStatus::basic;

    BasisLu lu;
    std::vector<double> xb(kRows), y(kRows), w(kRows), rhs(kRows), col(kRows);
    const int max_iters = 20000;
    const int bland_after = 2000;

    for (int iter = 0;; ++iter) {
        if (iter >= max_iters) throw SolverError("simplex iteration limit reached");
        if (!lu.factor(t, basic)) throw SolverError("simplex basis became singular");

        // Basic values: B xb = b - N_upper * upper.
        for (int r = 0; r < kRows; ++r) rhs[static_cast<std::size_t>(r)] = t.b[static_cast<std::size_t>(r)];
        for (int c = 0; c < kCols; ++c) {
            if (status[static_cast<std::size_t>(c)] == VarStatus::at_upper) {
                const double u = t.upper[static_cast<std::size_t>(c)];
                for (int r = 0; r < kRows; ++r) rhs[static_cast<std::size_t>(r)] -= t.at(r, c) * u;
            }
        }
        lu.solve(rhs.data(), xb.data());

        // Duals and reduced costs.
        for (int r = 0; r < kRows; ++r) {
            w[static_cast<std::size_t>(r)] = t.cost[static_cast<std::size_t>(basic[static_cast<std::size_t>(r)])];
        }
        lu.solve_transposed(w.data(), y.data());

        const bool bland = iter >= bland_after;
        int enter = -1;
        int dir = 0;
        double best = bland ? 0.0 : kCostTol;
        for (int c = 0; c < kCols; ++c) {
            if (status[static_cast<std::size_t>(c)] == VarStatus::basic) continue;
            if (t.upper[static_cast<std::size_t>(c)] - t.lower[static_cast<std::size_t>(c)] < kPivotTol) continue;
            double d = t.cost[static_cast<std::size_t>(c)];
            for (int r = 0; r < kRows; ++r) {
                if (t.at(r, c) != 0.0) d -= y[static_cast<std::size_t>(r)] * t.at(r, c);
            }
            const bool at_low = status[static_cast<std::size_t>(c)] == VarStatus::at_lower;
            const double score = at_low ? -d : d;
            if (score > (bland ? kCostTol : best)) {
                enter = c;
                dir = at_low ? 1 : -1;
                if (bland) break;
                best = score;
            }
        }
        if (enter < 0) break;  // optimal

        for (int r = 0; r < kRows; ++r) col[static_cast<std::size_t>(r)] = t.at(r, enter);
        lu.solve(col.data(), w.data());  // w = B^-1 a_enter

        // Ratio test: entering moves by delta*dir; basic j moves by
        // -dir*w_j*delta.
        double limit = t.upper[static_cast<std::size_t>(enter)] - t.lower[static_cast<std::size_t>(enter)];
        int leave = -1;       // index into basic[]
        int leave_bound = 0;  // 0 = lower, 1 = upper
        for (int r = 0; r < kRows; ++r) {
            const double step = -dir * w[static_cast<std::size_t>(r)];
            if (std::abs(step) < kPivotTol) continue;
            const int bc = basic[static_cast<std::size_t>(r)];
            const double lo = t.lower[static_cast<std::size_t>(bc)];
            const double hi = t.upper[static_cast<std::size_t>(bc)];
            double room;
            int bound;
            if (step > 0.0) {
                room = (hi - xb[static_cast<std::size_t>(r)]) / step;
                bound = 1;
            } else {
                room = (xb[static_cast<std::size_t>(r)] - lo) / -step;
                bound = 0;
            }
            room = std::max(room, 0.0);
            if (room < limit - 1e-12 || (room < limit + 1e-12 && leave >= 0 &&
                                         bc < basic[static_cast<std::size_t>(leave)])) {
                limit = room;
                leave = r;
                leave_bound = bound;
            }
        }
        if (!std::isfinite(limit)) throw SolverError("simplex detected an unbounded ray");

        if (leave < 0) {
            // Bound flip.
            status[static_cast<std::size_t>(enter)] =
                dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
            continue;
        }
        const int leaving_col = basic[static_cast<std::size_t>(leave)];
        basic[static_cast<std::size_t>(leave)] = enter;
        status[static_cast<std::size_t>(enter)] = VarStatus::basic;
        status[static_cast<std::size_t>(leaving_col)] =
            leave_bound == 0 ? VarStatus::at_lower : VarStatus::at_upper;
    }

    // Extract the solution.
    std::vector<double> value(kCols, 0.0);
    for (int c = 0; c < kCols; ++c) {
        if (status[static_cast<std::size_t>(c)] == VarStatus::at_upper) {
            value[static_cast<std::size_t>(c)] = t.upper[static_cast<std::size_t>(c)];
        } else if (status[static_cast<std::size_t>(c)] == VarStatus::at_lower) {
            value[static_cast<std::size_t>(c)] = t.lower[static_cast<std::size_t>(c)];
        }
    }
    for (int r = 0; r < kRows; ++r) rhs[static_cast<std::size_t>(r)] = t.b[static_cast<std::size_t>(r)];
    for (int c = 0; c < kCols; ++c) {
        if (status[static_cast<std::size_t>(c)] == VarStatus::at_upper) {
            for (int r = 0; r < kRows; ++r) {
                rhs[static_cast<std::size_t>(r)] -= t.at(r, c) * value[static_cast<std::size_t>(c)];
            }
        }
    }
    if (!lu.factor(t, basic)) throw SolverError("simplex final basis singular");
    lu.solve(rhs.data(), xb.data());
    for (int r = 0; r < kRows; ++r) {
        const int c = basic[static_cast<std::size_t>(r)];
        double v = xb[static_cast<std::size_t>(r)];
        const double lo = t.lower[static_cast<std::size_t>(c)];
        const double hi = t.upper[static_cast<std::size_t>(c)];
        if (v < lo - kFeasTol || v > hi + kFeasTol) {
            throw SolverError("simplex returned an infeasible basic value");
        }
        value[static_cast<std::size_t>(c)] = std::clamp(v, lo, hi);
    }

    DayDispatch out;
    for (int h = 0; h < kHours; ++h) {
        if (split) {
            split->u_charge[static_cast<std::size_t>(h)] = value[static_cast<std::size_t>(col_uc(h))];
            split->u_discharge[static_cast<std::size_t>(h)] = value[static_cast<std::size_t>(col_ud(h))];
            split->g_import[static_cast<std::size_t>(h)] = value[static_cast<std::size_t>(col_gp(h))];
            split->g_export[static_cast<std::size_t>(h)] = value[static_cast<std::size_t>(col_gn(h))];
        }
        const double u = value[static_cast<std::size_t>(col_uc(h))] -
                         value[static_cast<std::size_t>(col_ud(h))];
        out.u[static_cast<std::size_t>(h)] = u;
        out.x[static_cast<std::size_t>(h)] = value[static_cast<std::size_t>(col_x(h))];
        const double g = p.net_load[static_cast<std::size_t>(h)] + alpha * std::max(u, 0.0) +
                         beta * std::min(u, 0.0);
        out.g[static_cast<std::size_t>(h)] = g;
        out.cost += p.buy[static_cast<std::size_t>(h)] * std::max(g, 0.0) +
                    p.sell[static_cast<std::size_t>(h)] * std::min(g, 0.0);
    }
    return out;
}

}  // namespace derval
