// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. The CLI binary path is argv[1] (used by the determinism
// criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "derval/parallel.hpp"
#include "derval/pipeline.hpp"
#include "derval/synth.hpp"
#include "oracles.hpp"

using namespace derval;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

struct Criterion {
    const char* name;
    Clock::time_point start = Clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* n) : name(n) {}

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        } else if (!cond) {
            detail += "; " + what;
        }
    }

    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }

    ~Criterion() {
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", name, secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

RunConfig synth_config(int households, std::uint64_t seed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.synth = SynthConfig{};
    cfg.synth->n_households = households;
    cfg.synth->seed = seed;
    cfg.threads = 0;
    return cfg;
}

// --- Criterion 1: analytic exactness -------------------------------------

void criterion_analytic() {
    Criterion c("1 analytic: brute force equals the closed forms to 1e-12 on the full grid");
    for (double e : {1.5, 2.0, 3.0}) {
        for (double pa : {0.6, 0.75, 0.9}) {
            for (double rq : {0.0, 0.5, 0.9}) {
                for (int k = 0; k <= 10; ++k) {
                    ToyParams p;
                    p.e = e;
                    p.p_a = pa;
                    p.q = 1.0;
                    p.r = rq;
                    p.n = 200;
                    p.f = k / 10.0;
                    const ToyBrute brute = toy_brute(p);
                    const double cs = toy_cost_separate(p);
                    const double cc = toy_cost_coordinated(p);
                    const ToyVca v = toy_vca(p);
                    const double scale = std::max(1.0, p.t_bl());
                    c.require(std::abs(brute.cost_separate - cs) <= 1e-12 * scale,
                              "C_S mismatch at e=" + std::to_string(e));
                    c.require(std::abs(brute.cost_coordinated - cc) <= 1e-12 * scale,
                              "C_C mismatch at e=" + std::to_string(e));
                    c.require(std::abs((brute.cost_separate - brute.cost_coordinated) - v.dollars) <=
                                  1e-12 * scale,
                              "VCA mismatch at e=" + std::to_string(e));
                }
                ToyParams p;
                p.e = e;
                p.p_a = pa;
                p.q = 1.0;
                p.r = rq;
                p.n = 200;
                p.f = p.f_star();
                const double below = p.f * p.n * p.p_a * (p.q - p.r);
                const double above =
                    p.n * (1.0 + p.e - 2.0 * p.p_a - p.f * (p.e - p.p_a)) * (p.q - p.r);
                c.require(std::abs(below - above) <= 1e-12 * std::max(1.0, std::abs(below)),
                          "discontinuity at f_star");
            }
        }
    }
    ToyParams w;
    w.e = 2.0;
    w.p_a = 0.75;
    w.q = 1.0;
    w.r = 0.0;
    w.n = 100;
    w.f = 0.5;
    c.require(std::abs(toy_vca(w).dollars - 37.5) <= 1e-12, "VCA(0.5) != 37.5");
    w.f = 0.75;
    c.require(std::abs(toy_vca(w).dollars - 56.25) <= 1e-12, "VCA(0.75) != 56.25");
    w.f = 1.0;
    c.require(std::abs(toy_vca(w).dollars - 25.0) <= 1e-12, "VCA(1) != 25");
    c.require(std::abs(w.t_bl() - 150.0) <= 1e-12, "T_BL != 150");
}

// --- Criterion 2: LP vs discretized DP oracle -----------------------------

void criterion_lp_oracle() {
    Criterion c("2 dispatch LP within the discretization bound of a 0.01 kWh grid DP (100 instances)");
    const rng::Key key = rng::master(424242).child("acceptance-oracle");
    const double delta = 0.01;
    double worst_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
        const testutil::TestDay d = testutil::random_day(key.child(static_cast<std::uint64_t>(i)), 2.0);
        const DayProblem p = d.problem();
        const double lp = solve_day(p).cost;
        const double simplex = solve_day_simplex(p).cost;
        const double dp = testutil::grid_dp_cost(p, delta);
        c.require(std::abs(lp - simplex) <= 1e-6,
                  "pwl and simplex disagree on instance " + std::to_string(i));
        c.require(dp >= lp - 1e-6, "grid DP beat the LP on instance " + std::to_string(i));
        c.require(std::abs(dp - lp) <= testutil::grid_dp_bound(p, delta) + 1e-6,
                  "LP-DP gap above bound on instance " + std::to_string(i));
        worst_gap = std::max(worst_gap, std::abs(dp - lp));
    }
    c.note("worst |LP-DP| = " + std::to_string(worst_gap) + " $");
}

// --- Criterion 3: dispatch invariants on simulated household-days ---------

void criterion_dispatch_invariants() {
    Criterion c("3 dispatch invariants: state bounds 1e-9, no simultaneity 1e-6, device never hurts");
    const RunConfig cfg = synth_config(40, 11);
    const Population pop = load_population(cfg);
    const auto tech = size_population(pop);
    const RateLibrary lib = build_rate_library(pop, cfg);

    for (PolicyId policy : {PolicyId::P1, PolicyId::P2, PolicyId::P3, PolicyId::P4}) {
        std::vector<int> bad_state(pop.loads.size(), 0), bad_cost(pop.loads.size(), 0);
        std::map<std::string, PriceSchedule> by_zip;
        for (const auto& [zip, unused] : pop.ghi_by_zip) {
            by_zip.emplace(zip, assemble_policy(policy, zip, lib));
        }
        parallel_for(pop.loads.size(), cfg.threads, [&](std::size_t i) {
            const LoadTrace& t = pop.loads[i];
            const PriceSchedule& sched = by_zip.at(t.zip);
            double x0 = 0.0;
            for (int j = 0; j < pop.cal.n_days(); ++j) {
                const auto n = day_net_load(t.kwh.day(j), tech[i].pv_dc.day(j),
                                            tech[i].spec.eta_inverter);
                const DayProblem p{n, sched.buy.day(j), sched.sell.day(j), tech[i].spec, x0};
                const DayDispatch out = solve_day(p);
                const auto replay = testutil::replay_states(p, out.u);
                for (int h = 0; h < 24; ++h) {
                    const double x = replay[static_cast<std::size_t>(h)];
                    if (x < -1e-9 || x > tech[i].spec.capacity_kwh + 1e-9) ++bad_state[i];
                    const double u = out.u[static_cast<std::size_t>(h)];
                    const double g = out.g[static_cast<std::size_t>(h)];
                    if (std::min(std::max(u, 0.0), std::max(-u, 0.0)) > 1e-6) ++bad_state[i];
                    if (std::min(std::max(g, 0.0), std::max(-g, 0.0)) > 1e-6) ++bad_state[i];
                }
                if (out.cost > idle_day_cost(n, sched.buy.day(j), sched.sell.day(j)) + 1e-9) {
                    ++bad_cost[i];
                }
                x0 = out.x[23];
            }
        });
        for (std::size_t i = 0; i < pop.loads.size(); ++i) {
            c.require(bad_state[i] == 0, std::string(policy_name(policy)) + "/" +
                                             pop.loads[i].household_id + " violated state bounds");
            c.require(bad_cost[i] == 0, std::string(policy_name(policy)) + "/" +
                                            pop.loads[i].household_id + " device made a day worse");
        }
    }

    // Simplex split complementarity on a sample of household-days.
    const PriceSchedule sched = assemble_policy(PolicyId::P1, pop.loads[0].zip, lib);
    for (int j = 0; j < 30; ++j) {
        const auto n =
            day_net_load(pop.loads[0].kwh.day(j), tech[0].pv_dc.day(j), tech[0].spec.eta_inverter);
        SplitDiagnostics split;
        solve_day_simplex({n, sched.buy.day(j), sched.sell.day(j), tech[0].spec, 0.0},
                          kDefaultTieBreak, &split);
        for (int h = 0; h < 24; ++h) {
            c.require(std::min(split.u_charge[static_cast<std::size_t>(h)],
                               split.u_discharge[static_cast<std::size_t>(h)]) <= 1e-6,
                      "simultaneous charge/discharge in simplex solution");
            c.require(std::min(split.g_import[static_cast<std::size_t>(h)],
                               split.g_export[static_cast<std::size_t>(h)]) <= 1e-6,
                      "simultaneous buy/sell in simplex solution");
        }
    }
}

// --- Criterion 4: tariff correctness ---------------------------------------

void criterion_tariffs() {
    Criterion c("4 tariffs: TOU table hour-by-hour, flipped levels, sell<=buy, revenue neutrality 1e-9");
    const Calendar cal =
        Calendar::build(CivilDate{2011, 11, 1}, 366, default_holidays_2011_2012());
    const HourlySeries tou = build_retail_tou(cal);
    for (int j = 0; j < cal.n_days(); ++j) {
        const DayInfo& d = cal.day(j);
        const bool peak_day = !d.is_weekend && !d.is_holiday;
        const bool summer = d.date.month >= 6 && d.date.month <= 9;
        for (int h = 0; h < 24; ++h) {
            const bool peak = peak_day && h >= 16 && h < 21;
            const double expected = summer ? (peak ? 0.35817 : 0.25511)
                                           : (peak ? 0.22071 : 0.20191);
            if (tou.day(j)[static_cast<std::size_t>(h)] != expected) {
                c.require(false, "TOU mismatch on " + format_date(d.date) + " hour " +
                                     std::to_string(h));
            }
        }
    }

    const HourlySeries flipped = build_flipped_tou(cal);
    const int winter_day = cal.day_index(CivilDate{2012, 1, 17});
    const int summer_day = cal.day_index(CivilDate{2012, 7, 11});
    c.require(flipped.day(winter_day)[18] == 0.30, "flipped winter peak != 0.30");
    c.require(flipped.day(winter_day)[10] == 0.20, "flipped winter off-peak != 0.20");
    c.require(flipped.day(summer_day)[18] == 0.25, "flipped summer peak != 0.25");
    c.require(flipped.day(summer_day)[11] == 0.15, "flipped summer off-peak != 0.15");

    const RunConfig cfg = synth_config(30, 21);
    const Population pop = load_population(cfg);
    const RateLibrary lib = build_rate_library(pop, cfg);
    for (PolicyId policy : {PolicyId::P1, PolicyId::P2, PolicyId::P3, PolicyId::P4}) {
        for (const auto& [zip, unused] : pop.zip_geo) {
            const PriceSchedule sched = assemble_policy(policy, zip, lib);
            for (std::size_t h = 0; h < sched.buy.hours(); ++h) {
                if (sched.sell.v[h] > sched.buy.v[h]) {
                    c.require(false, std::string("sell > buy under ") + policy_name(policy));
                    break;
                }
            }
        }
    }

    // Constructed 2-zip instance: dynamic revenue neutrality day by day.
    std::map<std::string, HourlySeries> wholesale;
    HourlySeries w1(cal.hours()), w2(cal.hours());
    for (std::size_t h = 0; h < cal.hours(); ++h) {
        w1.v[h] = 0.02 + 0.015 * static_cast<double>(h % 24) / 24.0;
        w2.v[h] = 0.06 - 0.02 * static_cast<double>(h % 24) / 24.0;
    }
    wholesale.emplace("A", std::move(w1));
    wholesale.emplace("B", std::move(w2));
    std::vector<LoadTrace> loads;
    loads.push_back({"H1", "A", HourlySeries(cal.hours(), 0.0)});
    loads.push_back({"H2", "B", HourlySeries(cal.hours(), 0.0)});
    for (std::size_t h = 0; h < cal.hours(); ++h) {
        loads[0].kwh.v[h] = 0.4 + 0.5 * static_cast<double>(h % 24) / 24.0;
        loads[1].kwh.v[h] = 1.8 - 1.1 * static_cast<double>(h % 24) / 24.0;
    }
    const DynamicRates dyn = build_dynamic(tou, wholesale, loads, cal);
    for (int j = 0; j < cal.n_days(); ++j) {
        double rev_tou = 0.0, rev_dyn = 0.0;
        for (const LoadTrace& t : loads) {
            const auto l = t.kwh.day(j);
            const auto tq = tou.day(j);
            const auto dq = dyn.by_zip.at(t.zip).day(j);
            for (int h = 0; h < 24; ++h) {
                rev_tou += l[static_cast<std::size_t>(h)] * tq[static_cast<std::size_t>(h)];
                rev_dyn += l[static_cast<std::size_t>(h)] * dq[static_cast<std::size_t>(h)];
            }
        }
        if (std::abs(rev_dyn - rev_tou) > 1e-9 * rev_tou) {
            c.require(false, "revenue neutrality broke on day " + std::to_string(j));
            break;
        }
    }
}

// --- Criterion 5: net-zero identity ----------------------------------------

void criterion_net_zero() {
    Criterion c("5 net-zero sizing identity to 1e-9 relative on 1000 synthetic households");
    const RunConfig cfg = synth_config(1000, 31);
    const Population pop = load_population(cfg);
    for (const LoadTrace& t : pop.loads) {
        const HourlySeries& ghi = pop.ghi_by_zip.at(t.zip);
        const double z = net_zero_size(t.kwh, ghi, kInverterEfficiency);
        const double ac = kInverterEfficiency * z * ghi.sum();
        const double load = t.kwh.sum();
        if (std::abs(ac - load) > 1e-9 * load) {
            c.require(false, "identity broke for " + t.household_id);
            break;
        }
    }
    c.note("1000 households sized");
}

// --- Criterion 6: value-of-information properties --------------------------

void criterion_voi() {
    Criterion c("6 VOI: b(0)=b_N exact, no seed beats foresight, mean cost nondecreasing in CV");
    const RunConfig cfg = synth_config(50, 41);
    const Population pop = load_population(cfg);
    const auto tech = size_population(pop);
    const RateLibrary lib = build_rate_library(pop, cfg);
    PolicyRun run = run_policy_bills(pop, tech, lib, PolicyId::P1, cfg);

    const std::vector<double> grid{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    const int n_seeds = 30;
    const rng::Key root = rng::master(cfg.seed).child("acceptance-voi");

    std::vector<VoiResult> results(pop.loads.size());
    parallel_for(pop.loads.size(), cfg.threads, [&](std::size_t i) {
        results[i] = voi_household(pop.loads[i].kwh, tech[i].pv_dc, *run.schedule_by_household[i],
                                   tech[i].spec, tech[i].z, grid, n_seeds,
                                   root.child(pop.loads[i].household_id));
    });

    double mean_r2 = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const VoiResult& r = results[i];
        c.require(r.mean_cost[0] == run.b_n[i], "b(0) != b_N for " + pop.loads[i].household_id);
        for (std::size_t k = 0; k < r.cv_pct.size(); ++k) {
            for (double cost : r.seed_costs[k]) {
                if (cost < r.b_n - 1e-6) {
                    c.require(false, "a noisy seed beat perfect foresight for " +
                                         pop.loads[i].household_id);
                }
            }
        }
        int inversions = 0;
        double worst = 0.0;
        for (std::size_t k = 1; k < r.mean_cost.size(); ++k) {
            const double drop = r.mean_cost[k - 1] - r.mean_cost[k];
            if (drop > 0.0) {
                ++inversions;
                worst = std::max(worst, drop);
            }
        }
        c.require(inversions <= 1 && worst <= 1e-3 * r.b_n,
                  "mean cost not nondecreasing in CV for " + pop.loads[i].household_id);
        mean_r2 += r.r2;
    }
    mean_r2 /= static_cast<double>(results.size());
    c.note("mean R^2 = " + std::to_string(mean_r2) +
           (mean_r2 >= 0.9 ? " (>= 0.9)" : " (< 0.9, report-only)"));
}

// --- Criterion 7: coordination properties -----------------------------------

Population clone_population(const Population& base, int copies) {
    Population pop = base;
    pop.loads.clear();
    for (int i = 0; i < copies; ++i) {
        LoadTrace t = base.loads[0];
        char buf[16];
        std::snprintf(buf, sizeof buf, "H%05d", i);
        t.household_id = buf;
        pop.loads.push_back(std::move(t));
    }
    return pop;
}

void criterion_coordination() {
    Criterion c("7 coordination: VCA(0)=0, clone VCA=0, VCA>=0 uniform prices, interior hump, VCI up in CV");

    // (a) Default 200-household population under Policy 1: hump + VCA(0).
    RunConfig cfg = synth_config(200, 7);
    cfg.coord.policy = "P1";
    cfg.coord.patterns = {"forward"};
    cfg.coord.t_grid_pct = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    cfg.coord.cv_grid_pct = {};
    cfg.coord.report_group_priced_total = false;
    {
        const Population pop = load_population(cfg);
        const auto tech = size_population(pop);
        const RateLibrary lib = build_rate_library(pop, cfg);
        const PolicyRun run = run_policy_bills(pop, tech, lib, PolicyId::P1, cfg);
        const CoordSweep sweep = run_coord_sweep(pop, tech, run, cfg);

        c.require(std::abs(sweep.cells.front().vca) <= 1e-9 * sweep.t_bl, "VCA(0) != 0 under P1");
        std::size_t best = 0;
        for (std::size_t i = 0; i < sweep.cells.size(); ++i) {
            if (sweep.cells[i].vca > sweep.cells[best].vca) best = i;
        }
        const double t_best = sweep.cells[best].t_pct;
        c.require(t_best >= 20.0 && t_best <= 80.0,
                  "VCA maximum at t=" + std::to_string(t_best) + " outside [20, 80]");
        c.require(sweep.cells[best].vca > sweep.cells.front().vca &&
                      sweep.cells[best].vca > sweep.cells.back().vca,
                  "VCA maximum is not interior");
        for (std::size_t i = 1; i < sweep.cells.size(); ++i) {
            c.require(sweep.cells[i].capacity_frac >= sweep.cells[i - 1].capacity_frac,
                      "capacity fraction not monotone in t");
        }
        c.require(std::abs(sweep.cells.back().capacity_frac - 1.0) <= 1e-12,
                  "capacity fraction != 1 at t=100");
        char note[128];
        std::snprintf(note, sizeof note, "forward VCA peak at t=%d%% (%.1f%% of T_BL)",
                      static_cast<int>(t_best), 100.0 * sweep.cells[best].vca / sweep.t_bl);
        c.note(note);
    }

    // (b) Clone population: VCA must vanish where aggregation is exact
    // (t=0: no devices; t=100: pure N-fold scaling).
    {
        RunConfig clone_cfg = synth_config(1, 7);
        clone_cfg.coord.policy = "P1";
        clone_cfg.coord.patterns = {"forward"};
        clone_cfg.coord.t_grid_pct = {0, 100};
        clone_cfg.coord.cv_grid_pct = {};
        clone_cfg.coord.report_group_priced_total = false;
        const Population single = load_population(clone_cfg);
        const Population clones = clone_population(single, 16);
        const auto tech = size_population(clones);
        const RateLibrary lib = build_rate_library(clones, clone_cfg);
        const PolicyRun run = run_policy_bills(clones, tech, lib, PolicyId::P1, clone_cfg);
        const CoordSweep sweep = run_coord_sweep(clones, tech, run, clone_cfg);
        for (const CoordCell& cell : sweep.cells) {
            c.require(std::abs(cell.vca) <= 1e-6 * sweep.t_bl,
                      "clone VCA(" + std::to_string(cell.t_pct) + ") = " +
                          std::to_string(cell.vca) + " not 0");
        }
    }

    // (c) Uniform-price policy (P3): VCA never meaningfully negative.
    {
        RunConfig p3_cfg = synth_config(60, 7);
        p3_cfg.coord.policy = "P3";
        p3_cfg.coord.patterns = {"forward", "reverse", "random"};
        p3_cfg.coord.t_grid_pct = {0, 25, 50, 75, 100};
        p3_cfg.coord.cv_grid_pct = {};
        p3_cfg.coord.report_group_priced_total = false;
        const Population pop = load_population(p3_cfg);
        const auto tech = size_population(pop);
        const RateLibrary lib = build_rate_library(pop, p3_cfg);
        const PolicyRun run = run_policy_bills(pop, tech, lib, PolicyId::P3, p3_cfg);
        const CoordSweep sweep = run_coord_sweep(pop, tech, run, p3_cfg);
        for (const CoordCell& cell : sweep.cells) {
            c.require(cell.vca >= -1e-6 * sweep.t_bl,
                      "uniform-price VCA < 0 at t=" + std::to_string(cell.t_pct));
        }
    }

    // (d) VCI mean nondecreasing in CV at fixed adoption.
    {
        RunConfig vci_cfg = synth_config(60, 7);
        vci_cfg.coord.policy = "P1";
        vci_cfg.coord.patterns = {"forward"};
        vci_cfg.coord.t_grid_pct = {40};
        vci_cfg.coord.cv_grid_pct = {20, 60, 100};
        vci_cfg.coord.n_seeds = 10;
        vci_cfg.coord.report_group_priced_total = false;
        const Population pop = load_population(vci_cfg);
        const auto tech = size_population(pop);
        const RateLibrary lib = build_rate_library(pop, vci_cfg);
        const PolicyRun run = run_policy_bills(pop, tech, lib, PolicyId::P1, vci_cfg);
        const CoordSweep sweep = run_coord_sweep(pop, tech, run, vci_cfg);
        const CoordCell& cell = sweep.cells.front();
        for (std::size_t k = 1; k < cell.vci.size(); ++k) {
            c.require(cell.vci[k].mean >= cell.vci[k - 1].mean - 1e-9 * sweep.t_bl,
                      "VCI mean decreased from cv " + std::to_string(cell.vci[k - 1].cv_pct) +
                          " to " + std::to_string(cell.vci[k].cv_pct));
        }
        char note[160];
        std::snprintf(note, sizeof note, "VCI(t=40) over cv {20,60,100} = [%.0f, %.0f, %.0f] $",
                      cell.vci[0].mean, cell.vci[1].mean, cell.vci[2].mean);
        c.note(note);
    }
}

// --- Criterion 8: byte-identical determinism --------------------------------

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        out.emplace(fs::relative(entry.path(), dir).string(), buf.str());
    }
    return out;
}

void criterion_determinism(const std::string& cli) {
    Criterion c("8 determinism: `all --seed 7` twice is byte-identical; manifest rerun matches");
    if (cli.empty()) {
        c.require(false, "CLI path not supplied as argv[1]");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "derval_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg_path = base / "config.json";
    {
        std::ofstream out(cfg_path);
        out << R"({
  "synth": {"n_households": 25, "n_zips": 3},
  "policies": ["P1", "P2", "P3", "P4"],
  "voi": {"policy": "P1", "cv_grid_pct": [0, 25, 50, 75, 100], "n_seeds": 3},
  "coord": {"policy": "P1", "t_grid_pct": [0, 50, 100], "patterns": ["forward", "reverse"],
            "cv_grid_pct": [50], "n_seeds": 5},
  "bootstrap": {"b": 200, "alpha": 0.05}
})";
    }
    const fs::path out_dir = base / "out";
    const std::string cmd = "\"" + cli + "\" all --seed 7 --config " + cfg_path.string() +
                            " --out " + out_dir.string() + " > /dev/null 2>&1";
    c.require(std::system(cmd.c_str()) == 0, "first run failed");
    auto first = read_dir(out_dir);
    c.require(std::system(cmd.c_str()) == 0, "second run failed");
    auto second = read_dir(out_dir);

    c.require(!first.empty(), "no outputs written");
    c.require(first.size() == second.size(), "file sets differ between runs");
    for (const auto& [name, bytes] : first) {
        auto it = second.find(name);
        if (it == second.end() || it->second != bytes) {
            c.require(false, "output differs between runs: " + name);
        }
    }
    c.note(std::to_string(first.size()) + " files compared");

    // Rerunning from a manifest reproduces the same CSV bytes.
    const fs::path manifest = out_dir / "savings.csv.manifest.json";
    const fs::path redo_dir = base / "redo";
    const std::string redo_cmd = "\"" + cli + "\" all --config " + manifest.string() + " --out " +
                                 redo_dir.string() + " > /dev/null 2>&1";
    c.require(std::system(redo_cmd.c_str()) == 0, "manifest rerun failed");
    auto redo = read_dir(redo_dir);
    for (const auto& [name, bytes] : first) {
        if (name.find(".manifest.json") != std::string::npos) continue;  // embeds out_dir
        auto it = redo.find(name);
        if (it == redo.end() || it->second != bytes) {
            c.require(false, "manifest rerun differs: " + name);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    std::printf("acceptance suite (%s %s)\n", kToolName, kToolVersion);
    criterion_analytic();
    criterion_lp_oracle();
    criterion_dispatch_invariants();
    criterion_tariffs();
    criterion_net_zero();
    criterion_voi();
    criterion_coordination();
    criterion_determinism(cli);
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
