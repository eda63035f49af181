#include "derval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "derval/errors.hpp"
#include "derval/parallel.hpp"
#include "derval/synth.hpp"

namespace derval {

namespace fs = std::filesystem;
using nlohmann::json;

Calendar build_calendar_from_config(const CalendarConfig& cfg) {
    const CivilDate start = parse_date(cfg.start);
    std::vector<CivilDate> holidays;
    if (!cfg.holidays_file.empty()) {
        holidays = load_holiday_file(cfg.holidays_file);
    } else if (start == CivilDate{2011, 11, 1} && cfg.n_days == 366) {
        holidays = default_holidays_2011_2012();
    }
    return Calendar::build(start, cfg.n_days, holidays);
}

Population load_population(const RunConfig& cfg) {
    Population pop;
    pop.cal = build_calendar_from_config(cfg.calendar);
    if (cfg.data) {
        pop.loads = load_traces_csv(cfg.data->loads, pop.cal, &pop.ingest_stats);
        pop.ghi_by_zip = load_irradiance_csv(cfg.data->irradiance, pop.cal);
        pop.lmp_by_node = load_lmp_csv(cfg.data->lmp, pop.cal);
        pop.node_geo = load_geo_csv(cfg.data->nodes, "node_id");
        pop.zip_geo = load_geo_csv(cfg.data->zips, "zip");
    } else {
        SynthData synth = synth_population(*cfg.synth, pop.cal);
        pop.loads = std::move(synth.loads);
        pop.ghi_by_zip = std::move(synth.ghi_by_zip);
        pop.lmp_by_node = std::move(synth.lmp_by_node);
        pop.zip_geo = std::move(synth.zip_geo);
        pop.node_geo = std::move(synth.node_geo);
        pop.ingest_stats.households_read = static_cast<int>(pop.loads.size());
    }
    if (pop.loads.empty()) throw DataError("population is empty after ingestion filters");

    pop.zip_to_node = map_zip_to_node(pop.zip_geo, pop.node_geo);
    for (const LoadTrace& t : pop.loads) {
        if (!pop.zip_geo.count(t.zip)) {
            throw DataError("household " + t.household_id + " has zip " + t.zip +
                            " with no coordinates");
        }
        if (!pop.ghi_by_zip.count(t.zip)) {
            throw DataError("no irradiance series for zip " + t.zip);
        }
    }
    for (const auto& [zip, node] : pop.zip_to_node) {
        auto it = pop.lmp_by_node.find(node);
        if (it == pop.lmp_by_node.end()) throw DataError("no LMP series for node " + node);
        pop.wholesale_by_zip.emplace(zip, it->second);
    }
    return pop;
}

std::vector<HouseholdTech> size_population(const Population& pop) {
    std::vector<HouseholdTech> tech(pop.loads.size());
    for (std::size_t i = 0; i < pop.loads.size(); ++i) {
        const LoadTrace& t = pop.loads[i];
        const HourlySeries& ghi = pop.ghi_by_zip.at(t.zip);
        const double z = net_zero_size(t.kwh, ghi, kInverterEfficiency);
        tech[i].z = z;
        tech[i].spec = make_device(z);
        tech[i].pv_dc = pv_generation(z, ghi);
    }
    return tech;
}

RateLibrary build_rate_library(const Population& pop, const RunConfig& cfg) {
    RateLibrary lib;
    lib.retail_tou = build_retail_tou(pop.cal, cfg.rates.retail_tou);
    lib.flipped_tou = build_flipped_tou(pop.cal, cfg.rates.flipped_tou);
    lib.wholesale_by_zip = pop.wholesale_by_zip;
    DynamicRates dyn = build_dynamic(lib.retail_tou, pop.wholesale_by_zip, pop.loads, pop.cal);
    lib.dynamic_by_zip = std::move(dyn.by_zip);
    lib.dynamic_day_scale = std::move(dyn.day_scale);
    return lib;
}

PolicyRun run_policy_bills(const Population& pop, const std::vector<HouseholdTech>& tech,
                           const RateLibrary& lib, PolicyId policy, const RunConfig& cfg) {
    const std::size_t n = pop.loads.size();
    if (tech.size() != n) throw DataError("run_policy_bills: tech/population size mismatch");

    PolicyRun run;
    run.policy = policy;
    for (const LoadTrace& t : pop.loads) {
        if (!run.schedule_by_zip.count(t.zip)) {
            run.schedule_by_zip.emplace(t.zip, assemble_policy(policy, t.zip, lib));
        }
    }
    run.schedule_by_household.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        run.schedule_by_household[i] = &run.schedule_by_zip.at(pop.loads[i].zip);
    }

    run.b_bl.assign(n, 0.0);
    run.b_n.assign(n, 0.0);
    run.s_n.assign(n, 0.0);
    run.daily_bl.resize(n);
    run.daily_n.resize(n);
    run.failures.assign(n, "");

    const SolverKind kind = parse_solver(cfg.solver);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const LoadTrace& t = pop.loads[i];
        const PriceSchedule& sched = *run.schedule_by_household[i];
        run.daily_bl[i] = baseline_daily_costs(t.kwh, sched.buy);
        run.b_bl[i] = std::accumulate(run.daily_bl[i].begin(), run.daily_bl[i].end(), 0.0);
        try {
            YearResult year = run_year(t.kwh, tech[i].pv_dc, sched, tech[i].spec, kind, cfg.tie_break);
            run.b_n[i] = year.total_cost;
            run.daily_n[i] = std::move(year.daily_cost);
            run.s_n[i] = tech[i].z > 0.0 ? (run.b_bl[i] - run.b_n[i]) / tech[i].z : 0.0;
        } catch (const std::exception& e) {
            run.failures[i] = e.what();
        }
    });
    return run;
}

namespace {

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string());
    return dir;
}

std::vector<std::string> policy_names(const RunConfig& cfg) {
    std::vector<std::string> names = cfg.policies;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

double vector_mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void write_manifest(const std::string& csv_path, const std::string& command, const RunConfig& cfg,
                    const json& extra) {
    json doc;
    doc["file"] = fs::path(csv_path).filename().string();
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["seed"] = cfg.seed;
    doc["config_hash"] = config_hash(cfg);
    doc["config"] = config_to_json(cfg);
    if (!extra.is_null()) doc["report"] = extra;
    std::ofstream out(csv_path + ".manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write manifest for " + csv_path);
    out << doc.dump(2) << '\n';
}

StepReport step_synth_write(const Population& pop, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    StepReport report;
    const std::string loads = (dir / "loads.csv").string();
    write_loads_csv(loads, pop.loads);
    write_irradiance_csv((dir / "irradiance.csv").string(), pop.ghi_by_zip);
    write_lmp_csv((dir / "lmp.csv").string(), pop.lmp_by_node);
    write_geo_csv((dir / "nodes.csv").string(), "node_id", pop.node_geo);
    write_geo_csv((dir / "zips.csv").string(), "zip", pop.zip_geo);
    report.files = {loads, (dir / "irradiance.csv").string(), (dir / "lmp.csv").string(),
                    (dir / "nodes.csv").string(), (dir / "zips.csv").string()};
    report.extra = json{{"households", pop.loads.size()},
                        {"zips", pop.zip_geo.size()},
                        {"nodes", pop.node_geo.size()}};
    write_manifest(loads, "synth", cfg, report.extra);
    return report;
}

StepReport step_prices(const Population& pop, const RateLibrary& lib, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const std::string path = (dir / "rates_audit.csv").string();
    CsvWriter w(path, "zip,hour_index,buy,sell,policy");
    for (const std::string& name : policy_names(cfg)) {
        const PolicyId policy = parse_policy(name);
        for (const auto& [zip, _] : pop.zip_geo) {
            const PriceSchedule sched = assemble_policy(policy, zip, lib);
            for (std::size_t h = 0; h < sched.buy.hours(); ++h) {
                w.row({zip, std::to_string(h), format_double(sched.buy.v[h]),
                       format_double(sched.sell.v[h]), name});
            }
        }
    }
    w.close();

    const double rev_tou = revenue_on_loads(lib.retail_tou, pop.loads);
    const double rev_flipped = revenue_on_loads(lib.flipped_tou, pop.loads);
    StepReport report;
    report.files = {path};
    report.extra = json{
        {"flipped_tou_revenue_ratio", rev_tou > 0.0 ? rev_flipped / rev_tou : 0.0},
        {"dynamic_day_scale_mean", vector_mean(lib.dynamic_day_scale)},
        {"dynamic_day_scale_min",
         lib.dynamic_day_scale.empty()
             ? 0.0
             : *std::min_element(lib.dynamic_day_scale.begin(), lib.dynamic_day_scale.end())},
        {"dynamic_day_scale_max",
         lib.dynamic_day_scale.empty()
             ? 0.0
             : *std::max_element(lib.dynamic_day_scale.begin(), lib.dynamic_day_scale.end())}};
    write_manifest(path, "prices", cfg, report.extra);
    return report;
}

namespace {

// Per-hour schedule dump, one file per policy: re-solves the year so the
// bills path stays lean when the dump is off.
void write_dispatch_dump(const fs::path& dir, const Population& pop,
                         const std::vector<HouseholdTech>& tech, const PolicyRun& run,
                         const RunConfig& cfg, StepReport& report) {
    const SolverKind kind = parse_solver(cfg.solver);
    const std::string path =
        (dir / (std::string("dispatch_") + policy_name(run.policy) + ".csv")).string();
    CsvWriter w(path, "household_id,day,hour,u,x,g,cost_contrib");
    for (std::size_t i = 0; i < pop.loads.size(); ++i) {
        if (!run.failures[i].empty()) continue;
        const LoadTrace& t = pop.loads[i];
        const PriceSchedule& sched = *run.schedule_by_household[i];
        double x0 = 0.0;
        for (int j = 0; j < pop.cal.n_days(); ++j) {
            const auto n = day_net_load(t.kwh.day(j), tech[i].pv_dc.day(j),
                                        tech[i].spec.eta_inverter);
            const DayDispatch out = solve_day_with(
                kind, DayProblem{n, sched.buy.day(j), sched.sell.day(j), tech[i].spec, x0},
                cfg.tie_break);
            const auto q = sched.buy.day(j);
            const auto r = sched.sell.day(j);
            for (int h = 0; h < 24; ++h) {
                const double g = out.g[static_cast<std::size_t>(h)];
                const double contrib = q[static_cast<std::size_t>(h)] * std::max(g, 0.0) +
                                       r[static_cast<std::size_t>(h)] * std::min(g, 0.0);
                w.row({t.household_id, std::to_string(j), std::to_string(h),
                       format_double(out.u[static_cast<std::size_t>(h)]),
                       format_double(out.x[static_cast<std::size_t>(h)]), format_double(g),
                       format_double(contrib)});
            }
            x0 = out.x[23];
        }
    }
    w.close();
    report.files.push_back(path);
}

}  // namespace

StepReport step_savings(const Population& pop, const std::vector<HouseholdTech>& tech,
                        const std::vector<PolicyRun>& runs, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const std::size_t n = pop.loads.size();
    StepReport report;

    const std::string sizing_path = (dir / "sizing.csv").string();
    CsvWriter sw(sizing_path, "household_id,z_kw,capacity_kwh,rate_kw");
    for (std::size_t i = 0; i < n; ++i) {
        sw.row({pop.loads[i].household_id, format_double(tech[i].z),
                format_double(tech[i].spec.capacity_kwh), format_double(tech[i].spec.charge_kw)});
    }
    sw.close();
    report.files.push_back(sizing_path);

    // Records with bootstrap intervals, per household x policy.
    const rng::Key boot_root = rng::master(cfg.seed).child("bootstrap");
    std::vector<std::vector<SavingsRecord>> records(runs.size());
    for (std::size_t p = 0; p < runs.size(); ++p) {
        const PolicyRun& run = runs[p];
        records[p].resize(n);
        parallel_for(n, cfg.threads, [&, p](std::size_t i) {
            if (!run.failures[i].empty()) return;
            records[p][i] = make_savings_record(
                pop.loads[i].household_id, run.policy, tech[i].z, run.daily_bl[i], run.daily_n[i],
                cfg.bootstrap.b, cfg.bootstrap.alpha,
                boot_root.child(policy_name(run.policy)).child(pop.loads[i].household_id));
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (!run.failures[i].empty()) {
                report.failures.push_back(std::string(policy_name(run.policy)) + "/" +
                                          pop.loads[i].household_id + ": " + run.failures[i]);
            }
        }
    }

    const std::string savings_path = (dir / "savings.csv").string();
    CsvWriter w(savings_path, "household_id,policy,z,b_bl,b_n,s_a,s_n,s_a_lo,s_a_hi,s_n_lo,s_n_hi");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < runs.size(); ++p) {
            if (!runs[p].failures[i].empty()) continue;
            const SavingsRecord& r = records[p][i];
            w.row({r.household_id, policy_name(r.policy), format_double(r.z), format_double(r.b_bl),
                   format_double(r.b_n), format_double(r.s_a), format_double(r.s_n),
                   format_double(r.s_a_ci.lo), format_double(r.s_a_ci.hi),
                   format_double(r.s_n_ci.lo), format_double(r.s_n_ci.hi)});
        }
    }
    w.close();
    report.files.push_back(savings_path);

    // Cross-policy Spearman correlations for both savings metrics.
    const std::string corr_path = (dir / "correlations.csv").string();
    CsvWriter cw(corr_path, "policy_x,policy_y,metric,spearman");
    for (std::size_t a = 0; a < runs.size(); ++a) {
        for (std::size_t b = a + 1; b < runs.size(); ++b) {
            std::vector<double> sa_x, sa_y, sn_x, sn_y;
            for (std::size_t i = 0; i < n; ++i) {
                if (!runs[a].failures[i].empty() || !runs[b].failures[i].empty()) continue;
                sa_x.push_back(records[a][i].s_a);
                sa_y.push_back(records[b][i].s_a);
                sn_x.push_back(records[a][i].s_n);
                sn_y.push_back(records[b][i].s_n);
            }
            if (sa_x.size() >= 2) {
                cw.row({policy_name(runs[a].policy), policy_name(runs[b].policy), "s_a",
                        format_double(spearman(sa_x, sa_y))});
                cw.row({policy_name(runs[a].policy), policy_name(runs[b].policy), "s_n",
                        format_double(spearman(sn_x, sn_y))});
            }
        }
    }
    cw.close();
    report.files.push_back(corr_path);

    // Distribution quantiles (1..99) for plotting.
    const std::string quant_path = (dir / "quantiles.csv").string();
    CsvWriter qw(quant_path, "policy,metric,percentile,value");
    for (std::size_t p = 0; p < runs.size(); ++p) {
        std::vector<double> sa, sn;
        for (std::size_t i = 0; i < n; ++i) {
            if (!runs[p].failures[i].empty()) continue;
            sa.push_back(records[p][i].s_a);
            sn.push_back(records[p][i].s_n);
        }
        if (sa.empty()) continue;
        for (int pct = 1; pct <= 99; ++pct) {
            qw.row({policy_name(runs[p].policy), "s_a", std::to_string(pct),
                    format_double(quantile(sa, pct / 100.0))});
            qw.row({policy_name(runs[p].policy), "s_n", std::to_string(pct),
                    format_double(quantile(sn, pct / 100.0))});
        }
    }
    qw.close();
    report.files.push_back(quant_path);

    if (cfg.dump_dispatch) {
        for (const PolicyRun& run : runs) write_dispatch_dump(dir, pop, tech, run, cfg, report);
    }

    report.extra = json{{"households", n}, {"policies", policy_names(cfg)}};
    for (const std::string& f : report.files) write_manifest(f, "savings", cfg, report.extra);
    return report;
}

StepReport step_voi(const Population& pop, const std::vector<HouseholdTech>& tech,
                    const PolicyRun& run, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const std::size_t n = pop.loads.size();
    const SolverKind kind = parse_solver(cfg.solver);
    const rng::Key voi_root = rng::master(cfg.seed).child("voi");

    std::vector<VoiResult> results(n);
    std::vector<std::string> failures(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        if (!run.failures[i].empty()) {
            failures[i] = run.failures[i];
            return;
        }
        try {
            results[i] = voi_household(pop.loads[i].kwh, tech[i].pv_dc,
                                       *run.schedule_by_household[i], tech[i].spec, tech[i].z,
                                       cfg.voi.cv_grid_pct, cfg.voi.n_seeds,
                                       voi_root.child(pop.loads[i].household_id), kind,
                                       cfg.tie_break);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    const std::string path = (dir / "voi.csv").string();
    CsvWriter w(path, "household_id,z,cv,annual_cost,slope,norm_slope,r2");
    StepReport report;
    double mean_r2 = 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            report.failures.push_back("voi/" + pop.loads[i].household_id + ": " + failures[i]);
            continue;
        }
        const VoiResult& r = results[i];
        for (std::size_t k = 0; k < r.cv_pct.size(); ++k) {
            w.row({pop.loads[i].household_id, format_double(tech[i].z), format_double(r.cv_pct[k]),
                   format_double(r.mean_cost[k]), format_double(r.slope),
                   format_double(r.norm_slope), format_double(r.r2)});
        }
        mean_r2 += r.r2;
        ++ok;
    }
    w.close();
    report.files = {path};
    report.extra = json{{"policy", policy_name(run.policy)},
                        {"n_seeds", cfg.voi.n_seeds},
                        {"mean_r2", ok ? mean_r2 / static_cast<double>(ok) : 0.0}};
    write_manifest(path, "voi", cfg, report.extra);
    return report;
}

CoordSweep run_coord_sweep(const Population& pop, const std::vector<HouseholdTech>& tech,
                           const PolicyRun& run, const RunConfig& cfg) {
    const std::size_t n = pop.loads.size();
    const SolverKind kind = parse_solver(cfg.solver);
    const rng::Key master = rng::master(cfg.seed);

    for (std::size_t i = 0; i < n; ++i) {
        if (!run.failures[i].empty()) {
            throw SolverError("coordination requires bills for every household; " +
                              pop.loads[i].household_id + " failed: " + run.failures[i]);
        }
    }

    std::vector<std::string> ids(n);
    std::vector<DeviceSpec> specs(n);
    std::vector<HourlySeries> pv(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = pop.loads[i].household_id;
        specs[i] = tech[i].spec;
        pv[i] = tech[i].pv_dc;  // copies; population scale is modest
    }
    const double total_capacity = std::accumulate(
        tech.begin(), tech.end(), 0.0, [](double acc, const HouseholdTech& t) { return acc + t.z; });

    CoordSweep sweep;
    sweep.t_bl = std::accumulate(run.b_bl.begin(), run.b_bl.end(), 0.0);

    // Household-level noisy bills b-dagger(cv, seed), shared across patterns
    // and adoption levels.
    const std::size_t n_cv = cfg.coord.cv_grid_pct.size();
    const std::size_t n_seeds = static_cast<std::size_t>(cfg.coord.n_seeds);
    std::vector<double> btable(n * n_cv * n_seeds, 0.0);
    const rng::Key noisy_root = master.child("coord-household");
    parallel_for(n * n_cv * n_seeds, cfg.threads, [&](std::size_t flat) {
        const std::size_t i = flat / (n_cv * n_seeds);
        const std::size_t k = (flat / n_seeds) % n_cv;
        const std::size_t rep = flat % n_seeds;
        const double cv = cfg.coord.cv_grid_pct[k] / 100.0;
        const NoiseModel noise =
            make_noise(cv, pop.loads[i].kwh.mean(), pv[i].mean(),
                       noisy_root.child(ids[i]).child(rep));
        btable[flat] = run_year_realized(pop.loads[i].kwh, pv[i], *run.schedule_by_household[i],
                                         specs[i], noise, kind, cfg.tie_break)
                           .total_cost;
    });
    auto bdagger = [&](std::size_t i, std::size_t k, std::size_t rep) {
        return btable[(i * n_cv + k) * n_seeds + rep];
    };

    // Re-priced uncoordinated totals (zip-varying policies only): individual
    // bills evaluated at the coordinator's mean prices.
    const bool repriced = cfg.coord.report_group_priced_total &&
                          (run.policy == PolicyId::P1 || run.policy == PolicyId::P2);
    std::vector<double> b_bl_gp, b_n_gp;
    GroupProblem price_base = build_group_problem(pop.loads, pv, run.schedule_by_household, specs,
                                                  std::vector<int>{}, cfg.coord.group_self_discharge);
    if (repriced) {
        b_bl_gp.assign(n, 0.0);
        b_n_gp.assign(n, 0.0);
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            b_bl_gp[i] = baseline_bill(pop.loads[i].kwh, price_base.prices.buy);
            b_n_gp[i] =
                run_year(pop.loads[i].kwh, pv[i], price_base.prices, specs[i], kind, cfg.tie_break)
                    .total_cost;
        });
    }

    struct Cell {
        AdoptionPattern pattern;
        double t_pct;
        std::vector<int> adopters;
        GroupProblem group;
    };
    std::vector<Cell> cells;
    for (const std::string& pname : cfg.coord.patterns) {
        const AdoptionPattern pattern = parse_pattern(pname);
        const std::vector<int> order = rank_households(
            run.s_n, ids, pattern, master.child("adoption").child(cfg.coord.random_pattern_seed));
        for (double t : cfg.coord.t_grid_pct) {
            Cell cell;
            cell.pattern = pattern;
            cell.t_pct = t;
            cell.adopters = adopters_at(order, t);
            cell.group = build_group_problem(pop.loads, pv, run.schedule_by_household, specs,
                                             cell.adopters, cfg.coord.group_self_discharge);
            cells.push_back(std::move(cell));
        }
    }

    // Perfect-foresight coordinated cost per cell.
    std::vector<double> coord_cost(cells.size(), 0.0);
    parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
        coord_cost[c] = run_year(cells[c].group.load, cells[c].group.pv_dc, cells[c].group.prices,
                                 cells[c].group.spec, kind, cfg.tie_break)
                            .total_cost;
    });

    // Noisy coordinated cost per (cell, seed); the coordinator's forecast cv
    // comes from the scaling law, not from the household cv grid.
    std::vector<double> coord_noisy(cells.size() * n_seeds, 0.0);
    const rng::Key group_root = master.child("coord-group");
    if (!cfg.coord.cv_grid_pct.empty()) {
        parallel_for(cells.size() * n_seeds, cfg.threads, [&](std::size_t flat) {
            const std::size_t c = flat / n_seeds;
            const std::size_t rep = flat % n_seeds;
            const Cell& cell = cells[c];
            const double cv_load = cfg.coord.scaling_law(cell.group.mean_load_bar);
            const double cv_gen = cfg.coord.scaling_law(cell.group.mean_gen_bar);
            NoiseModel noise;
            noise.sigma_load = cv_load * cell.group.mean_load_bar;
            noise.sigma_gen = cv_gen * cell.group.mean_gen_bar;
            noise.key = group_root.child(pattern_name(cell.pattern))
                            .child(static_cast<std::uint64_t>(std::llround(cell.t_pct * 100.0)))
                            .child(rep);
            coord_noisy[flat] = run_year_realized(cell.group.load, cell.group.pv_dc,
                                                  cell.group.prices, cell.group.spec, noise, kind,
                                                  cfg.tie_break)
                                    .total_cost;
        });
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        CoordCell out;
        out.pattern = cell.pattern;
        out.t_pct = cell.t_pct;

        std::vector<bool> adopted(n, false);
        double adopted_capacity = 0.0;
        for (int idx : cell.adopters) {
            adopted[static_cast<std::size_t>(idx)] = true;
            adopted_capacity += tech[static_cast<std::size_t>(idx)].z;
        }
        out.capacity_frac = total_capacity > 0.0 ? adopted_capacity / total_capacity : 0.0;

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += adopted[i] ? run.b_n[i] : run.b_bl[i];
        out.total_uncoordinated = total;
        out.total_coordinated = coord_cost[c];
        out.vca = out.total_uncoordinated - out.total_coordinated;
        out.vca_frac = sweep.t_bl > 0.0 ? out.vca / sweep.t_bl : 0.0;

        double baseline_nonadopters = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!adopted[i]) baseline_nonadopters += run.b_bl[i];
        }
        for (std::size_t k = 0; k < n_cv; ++k) {
            CoordCell::Vci v;
            v.cv_pct = cfg.coord.cv_grid_pct[k];
            v.n_seeds = static_cast<int>(n_seeds);
            double sum = 0.0, sumsq = 0.0;
            for (std::size_t rep = 0; rep < n_seeds; ++rep) {
                double adopters_noisy = 0.0;
                for (int idx : cell.adopters) {
                    adopters_noisy += bdagger(static_cast<std::size_t>(idx), k, rep);
                }
                const double vci_rep = adopters_noisy + baseline_nonadopters -
                                       coord_noisy[c * n_seeds + rep] - out.vca;
                sum += vci_rep;
                sumsq += vci_rep * vci_rep;
            }
            v.mean = sum / static_cast<double>(n_seeds);
            if (n_seeds > 1) {
                const double var =
                    std::max(0.0, (sumsq - sum * sum / static_cast<double>(n_seeds)) /
                                      static_cast<double>(n_seeds - 1));
                v.stderr_mean = std::sqrt(var / static_cast<double>(n_seeds));
            }
            v.frac = sweep.t_bl > 0.0 ? v.mean / sweep.t_bl : 0.0;
            out.vci.push_back(v);
        }
        sweep.cells.push_back(std::move(out));

        if (repriced) {
            CoordCell gp = sweep.cells.back();
            gp.vci.clear();
            double total_gp = 0.0;
            for (std::size_t i = 0; i < n; ++i) total_gp += adopted[i] ? b_n_gp[i] : b_bl_gp[i];
            gp.total_uncoordinated = total_gp;
            gp.vca = gp.total_uncoordinated - gp.total_coordinated;
            gp.vca_frac = sweep.t_bl > 0.0 ? gp.vca / sweep.t_bl : 0.0;
            sweep.group_priced.push_back(std::move(gp));
        }
    }
    return sweep;
}

namespace {

void write_coord_csv(const std::string& path, const std::vector<CoordCell>& cells) {
    CsvWriter w(path,
                "pattern,t_pct,capacity_frac,T_total,C_total,vca,vca_frac_of_tbl,cv,vci,"
                "vci_frac_of_tbl,n_seeds,stderr");
    for (const CoordCell& c : cells) {
        w.row({pattern_name(c.pattern), format_double(c.t_pct), format_double(c.capacity_frac),
               format_double(c.total_uncoordinated), format_double(c.total_coordinated),
               format_double(c.vca), format_double(c.vca_frac), "0", "0", "0", "0", "0"});
        for (const CoordCell::Vci& v : c.vci) {
            w.row({pattern_name(c.pattern), format_double(c.t_pct), format_double(c.capacity_frac),
                   format_double(c.total_uncoordinated), format_double(c.total_coordinated),
                   format_double(c.vca), format_double(c.vca_frac), format_double(v.cv_pct),
                   format_double(v.mean), format_double(v.frac), std::to_string(v.n_seeds),
                   format_double(v.stderr_mean)});
        }
    }
    w.close();
}

}  // namespace

StepReport step_coord(const Population& pop, const std::vector<HouseholdTech>& tech,
                      const PolicyRun& run, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const CoordSweep sweep = run_coord_sweep(pop, tech, run, cfg);

    StepReport report;
    const std::string path = (dir / "coord.csv").string();
    write_coord_csv(path, sweep.cells);
    report.files = {path};
    if (!sweep.group_priced.empty()) {
        const std::string gp_path = (dir / "coord_group_priced.csv").string();
        write_coord_csv(gp_path, sweep.group_priced);
        report.files.push_back(gp_path);
    }
    report.extra = json{{"policy", policy_name(run.policy)},
                        {"t_bl", sweep.t_bl},
                        {"n_seeds", cfg.coord.n_seeds},
                        {"scaling_law",
                         {{"a", cfg.coord.scaling_law.a},
                          {"b", cfg.coord.scaling_law.b},
                          {"cv_min", cfg.coord.scaling_law.cv_min},
                          {"cv_max", cfg.coord.scaling_law.cv_max}}}};
    for (const std::string& f : report.files) write_manifest(f, "coord", cfg, report.extra);
    return report;
}

StepReport step_analytic(const ToyParams& params, double f_step, const RunConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const std::string path = (dir / "analytic.csv").string();
    CsvWriter w(path, "f,vca,vca_frac,regime");
    for (const ToyCurvePoint& pt : toy_curve(params, f_step)) {
        w.row({format_double(pt.f), format_double(pt.vca), format_double(pt.vca_fraction),
               pt.exporting ? "export" : "import"});
    }
    w.close();
    StepReport report;
    report.files = {path};
    report.extra = json{{"e", params.e},         {"p_a", params.p_a}, {"q", params.q},
                        {"r", params.r},         {"n", params.n},     {"f_star", params.f_star()},
                        {"t_bl", params.t_bl()}, {"f_step", f_step}};
    write_manifest(path, "analytic", cfg, report.extra);
    return report;
}

}  // namespace derval
