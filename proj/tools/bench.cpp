// Benchmark: fast value-function day solver vs the dense simplex reference,
// and single-thread vs OpenMP population runs.

#include <chrono>
#include <cstdio>
#include <vector>

#include "derval/config.hpp"
#include "derval/parallel.hpp"
#include "derval/pipeline.hpp"
#include "derval/rng.hpp"

using namespace derval;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

DayProblem random_day(const rng::Key& key, std::vector<double>& storage) {
    storage.assign(72, 0.0);
    for (int h = 0; h < 24; ++h) {
        storage[static_cast<std::size_t>(h)] = 2.0 * key.u01(static_cast<std::uint64_t>(h)) - 0.8;
        const double q = 0.05 + 0.4 * key.u01(static_cast<std::uint64_t>(100 + h));
        storage[static_cast<std::size_t>(24 + h)] = q;
        storage[static_cast<std::size_t>(48 + h)] = q * key.u01(static_cast<std::uint64_t>(200 + h));
    }
    DeviceSpec spec = make_device(2.0);
    DayProblem p{{storage.data(), 24}, {storage.data() + 24, 24}, {storage.data() + 48, 24}, spec,
                 0.5};
    return p;
}

}  // namespace

int main() {
    const rng::Key key = rng::master(42).child("bench");

    // Day-solver comparison.
    const int n_days = 2000;
    std::vector<std::vector<double>> problems(n_days);
    double checksum_pwl = 0.0, checksum_simplex = 0.0;

    auto t0 = Clock::now();
    for (int i = 0; i < n_days; ++i) {
        DayProblem p = random_day(key.child(static_cast<std::uint64_t>(i)), problems[static_cast<std::size_t>(i)]);
        checksum_pwl += solve_day(p).cost;
    }
    const double pwl_s = seconds_since(t0);

    const int n_simplex = 200;
    t0 = Clock::now();
    for (int i = 0; i < n_simplex; ++i) {
        DayProblem p = random_day(key.child(static_cast<std::uint64_t>(i)), problems[static_cast<std::size_t>(i)]);
        checksum_simplex += solve_day_simplex(p).cost;
    }
    const double simplex_s = seconds_since(t0);

    std::printf("day solver: pwl %.2f us/solve, simplex %.2f us/solve (%.0fx)\n",
                1e6 * pwl_s / n_days, 1e6 * simplex_s / n_simplex,
                (simplex_s / n_simplex) / (pwl_s / n_days));
    std::printf("  checksums: pwl %.6f simplex %.6f\n", checksum_pwl, checksum_simplex);

    // Population run: serial vs parallel.
    RunConfig cfg;
    cfg.synth = SynthConfig{};
    cfg.synth->n_households = 60;
    cfg.synth->seed = 7;
    cfg.seed = 7;

    const Population pop = load_population(cfg);
    const std::vector<HouseholdTech> tech = size_population(pop);
    const RateLibrary lib = build_rate_library(pop, cfg);

    cfg.threads = 1;
    t0 = Clock::now();
    const PolicyRun serial = run_policy_bills(pop, tech, lib, PolicyId::P1, cfg);
    const double serial_s = seconds_since(t0);

    cfg.threads = 0;
    t0 = Clock::now();
    const PolicyRun parallel = run_policy_bills(pop, tech, lib, PolicyId::P1, cfg);
    const double parallel_s = seconds_since(t0);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial.b_n.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(serial.b_n[i] - parallel.b_n[i]));
    }
    std::printf("population year (%d households, policy P1): serial %.2fs, %d threads %.2fs (%.2fx)\n",
                cfg.synth->n_households, serial_s, hardware_threads(), parallel_s,
                serial_s / parallel_s);
    std::printf("  serial vs parallel bill difference: %.3g (must be 0)\n", max_diff);
    return max_diff == 0.0 ? 0 : 1;
}
