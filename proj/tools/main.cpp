#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "derval/errors.hpp"
#include "derval/io.hpp"
#include "derval/parallel.hpp"
#include "derval/pipeline.hpp"

namespace {

using namespace derval;

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string solver;
};

RunConfig resolve_config(const CliOverrides& cli, bool allow_default) {
    RunConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = load_config_file(cli.config_path);
    } else if (!allow_default) {
        throw ConfigError("--config is required for this command");
    } else {
        cfg.synth = SynthConfig{};  // default synthetic population
        cfg.synth->seed = cfg.seed;
    }
    if (const char* env = std::getenv("DERVAL_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (cli.seed) {
        const bool synth_inherited = cfg.synth && cfg.synth->seed == cfg.seed;
        cfg.seed = *cli.seed;
        if (synth_inherited) cfg.synth->seed = cfg.seed;
    }
    if (cli.threads) cfg.threads = *cli.threads;
    if (!cli.solver.empty()) cfg.solver = cli.solver;
    require_valid(cfg);
    return cfg;
}

void print_files(const StepReport& report) {
    for (const std::string& f : report.files) std::printf("wrote %s\n", f.c_str());
}

int finish(const RunConfig& cfg, const std::vector<std::string>& failures) {
    if (failures.empty()) return 0;
    CsvWriter w(cfg.out_dir + "/failures.csv", "context,message");
    for (const std::string& f : failures) {
        const auto colon = f.find(": ");
        if (colon == std::string::npos) {
            w.row({f, ""});
        } else {
            w.row({f.substr(0, colon), f.substr(colon + 2)});
        }
    }
    w.close();
    std::fprintf(stderr, "%zu household-level solver failures; see failures.csv\n", failures.size());
    return 3;
}

struct Workspace {
    Population pop;
    std::vector<HouseholdTech> tech;
    RateLibrary rates;
};

Workspace prepare(const RunConfig& cfg) {
    Workspace ws;
    ws.pop = load_population(cfg);
    ws.tech = size_population(ws.pop);
    ws.rates = build_rate_library(ws.pop, cfg);
    return ws;
}

const PolicyRun& bills_for(std::vector<PolicyRun>& cache, const Workspace& ws, PolicyId policy,
                           const RunConfig& cfg) {
    for (const PolicyRun& run : cache) {
        if (run.policy == policy) return run;
    }
    cache.push_back(run_policy_bills(ws.pop, ws.tech, ws.rates, policy, cfg));
    return cache.back();
}

int run_command(const std::string& command, const CliOverrides& cli, const ToyParams& toy,
                double f_step) {
    if (command == "analytic") {
        RunConfig cfg;
        if (!cli.config_path.empty()) cfg = load_config_file(cli.config_path);
        if (const char* env = std::getenv("DERVAL_OUT_DIR"); env && *env) cfg.out_dir = env;
        if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
        toy.validate();
        print_files(step_analytic(toy, f_step, cfg));
        return 0;
    }
    if (command == "validate") {
        RunConfig cfg;
        if (!cli.config_path.empty()) {
            cfg = load_config_file(cli.config_path);
        } else {
            throw ConfigError("validate requires --config");
        }
        const auto diags = validate_config(cfg);
        if (diags.empty()) {
            std::printf("configuration ok\n");
            return 0;
        }
        for (const Diagnostic& d : diags) {
            std::printf("%s: %s\n", d.path.c_str(), d.message.c_str());
        }
        return 1;
    }

    const RunConfig cfg = resolve_config(cli, /*allow_default=*/true);
    std::vector<std::string> failures;

    if (command == "synth") {
        if (!cfg.synth) throw ConfigError("synth command requires a synth config block");
        RunConfig synth_only = cfg;
        synth_only.data.reset();  // generate even when real paths are configured
        Population pop = load_population(synth_only);
        print_files(step_synth_write(pop, cfg));
        return 0;
    }

    Workspace ws = prepare(cfg);
    std::vector<PolicyRun> cache;

    if (command == "prices" || command == "all") {
        print_files(step_prices(ws.pop, ws.rates, cfg));
    }
    if (command == "savings" || command == "all") {
        std::vector<PolicyRun> runs;
        for (const std::string& name : cfg.policies) {
            runs.push_back(run_policy_bills(ws.pop, ws.tech, ws.rates, parse_policy(name), cfg));
        }
        const StepReport report = step_savings(ws.pop, ws.tech, runs, cfg);
        print_files(report);
        failures.insert(failures.end(), report.failures.begin(), report.failures.end());
        for (PolicyRun& run : runs) cache.push_back(std::move(run));
    }
    if (command == "voi" || command == "all") {
        const PolicyRun& run = bills_for(cache, ws, parse_policy(cfg.voi.policy), cfg);
        const StepReport report = step_voi(ws.pop, ws.tech, run, cfg);
        print_files(report);
        failures.insert(failures.end(), report.failures.begin(), report.failures.end());
    }
    if (command == "coord" || command == "all") {
        const PolicyRun& run = bills_for(cache, ws, parse_policy(cfg.coord.policy), cfg);
        const StepReport report = step_coord(ws.pop, ws.tech, run, cfg);
        print_files(report);
        failures.insert(failures.end(), report.failures.begin(), report.failures.end());
    }
    if (command == "all") {
        if (!cfg.data && cfg.synth) print_files(step_synth_write(ws.pop, cfg));
        toy.validate();
        print_files(step_analytic(toy, f_step, cfg));
    }
    return finish(cfg, failures);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behind-the-meter PV + storage valuation"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "JSON config file (or a run manifest)");
    app.add_option("--out", cli.out_dir, "output directory (overrides config and DERVAL_OUT_DIR)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "master seed override");
    int threads_value = 0;
    auto* threads_opt = app.add_option("--threads", threads_value, "worker threads (0 = auto)");
    app.add_option("--solver", cli.solver, "day solver: pwl or simplex");

    ToyParams toy;
    double f_step = 0.01;
    for (const char* name : {"synth", "prices", "savings", "voi", "coord", "all", "validate"}) {
        app.add_subcommand(name)->fallthrough();
    }
    auto* analytic = app.add_subcommand("analytic");
    analytic->fallthrough();
    analytic->add_option("--e", toy.e, "per-adopter generation (> 1)");
    analytic->add_option("--pa", toy.p_a, "fraction of type-A households");
    analytic->add_option("--q", toy.q, "purchase price");
    analytic->add_option("--r", toy.r, "sale price (< q)");
    analytic->add_option("--n", toy.n, "household count");
    analytic->add_option("--f-step", f_step, "adoption fraction step for the output curve");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) cli.seed = seed_value;
    if (*threads_opt) cli.threads = threads_value;

    try {
        return run_command(app.get_subcommands().front()->get_name(), cli, toy, f_step);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
