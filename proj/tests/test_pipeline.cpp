#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "derval/pipeline.hpp"

using namespace derval;

namespace {

RunConfig small_config(int households) {
    RunConfig cfg;
    cfg.seed = 13;
    cfg.synth = SynthConfig{};
    cfg.synth->n_households = households;
    cfg.synth->seed = 13;
    cfg.threads = 0;
    cfg.coord.policy = "P1";
    cfg.coord.patterns = {"forward"};
    cfg.coord.t_grid_pct = {0, 25, 50, 75, 100};
    cfg.coord.cv_grid_pct = {};
    cfg.coord.report_group_priced_total = false;
    return cfg;
}

struct Prepared {
    Population pop;
    std::vector<HouseholdTech> tech;
    RateLibrary lib;
    PolicyRun run;
};

Prepared prepare(const RunConfig& cfg, PolicyId policy) {
    Prepared p;
    p.pop = load_population(cfg);
    p.tech = size_population(p.pop);
    p.lib = build_rate_library(p.pop, cfg);
    p.run = run_policy_bills(p.pop, p.tech, p.lib, policy, cfg);
    return p;
}

}  // namespace

TEST_CASE("uncoordinated totals hit the baseline and full-tech endpoints") {
    const RunConfig cfg = small_config(15);
    const Prepared p = prepare(cfg, PolicyId::P1);
    const CoordSweep sweep = run_coord_sweep(p.pop, p.tech, p.run, cfg);

    const double t_bl = std::accumulate(p.run.b_bl.begin(), p.run.b_bl.end(), 0.0);
    const double t_all = std::accumulate(p.run.b_n.begin(), p.run.b_n.end(), 0.0);
    CHECK(sweep.t_bl == doctest::Approx(t_bl));
    CHECK(sweep.cells.front().total_uncoordinated == doctest::Approx(t_bl));
    CHECK(sweep.cells.back().total_uncoordinated == doctest::Approx(t_all));

    // T(t) never increases as adopters are added, and the adopted capacity
    // fraction climbs to exactly one.
    for (std::size_t i = 1; i < sweep.cells.size(); ++i) {
        CHECK(sweep.cells[i].total_uncoordinated <=
              sweep.cells[i - 1].total_uncoordinated + 1e-9);
        CHECK(sweep.cells[i].capacity_frac >= sweep.cells[i - 1].capacity_frac);
    }
    CHECK(sweep.cells.front().capacity_frac == 0.0);
    CHECK(sweep.cells.back().capacity_frac == doctest::Approx(1.0).epsilon(1e-12));

    // Every household strictly benefits from its own net-zero system here.
    for (std::size_t i = 0; i < p.run.b_n.size(); ++i) {
        CHECK(p.run.b_n[i] <= p.run.b_bl[i] + 1e-9);
    }
}

TEST_CASE("VCI vanishes identically at zero noise everywhere") {
    RunConfig cfg = small_config(10);
    cfg.coord.t_grid_pct = {50};
    cfg.coord.cv_grid_pct = {0};  // households have perfect foresight
    cfg.coord.n_seeds = 3;
    cfg.coord.scaling_law.a = 0.0;  // w == 0: coordinator too
    cfg.coord.scaling_law.cv_min = 0.0;
    cfg.coord.scaling_law.cv_max = 0.0;

    const Prepared p = prepare(cfg, PolicyId::P1);
    const CoordSweep sweep = run_coord_sweep(p.pop, p.tech, p.run, cfg);
    REQUIRE(sweep.cells.size() == 1);
    REQUIRE(sweep.cells.front().vci.size() == 1);
    CHECK(sweep.cells.front().vci.front().mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sweep.cells.front().vci.front().stderr_mean == doctest::Approx(0.0));
}

TEST_CASE("savings step emits the full csv family") {
    RunConfig cfg = small_config(6);
    cfg.out_dir = (std::filesystem::temp_directory_path() / "derval_pipeline_test").string();
    cfg.bootstrap.b = 50;
    std::filesystem::remove_all(cfg.out_dir);

    const Population pop = load_population(cfg);
    const auto tech = size_population(pop);
    const RateLibrary lib = build_rate_library(pop, cfg);
    std::vector<PolicyRun> runs;
    runs.push_back(run_policy_bills(pop, tech, lib, PolicyId::P1, cfg));
    runs.push_back(run_policy_bills(pop, tech, lib, PolicyId::P3, cfg));
    const StepReport report = step_savings(pop, tech, runs, cfg);

    for (const char* name : {"sizing.csv", "savings.csv", "correlations.csv", "quantiles.csv"}) {
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / name));
        CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) /
                                      (std::string(name) + ".manifest.json")));
    }
    CHECK(report.failures.empty());
}
