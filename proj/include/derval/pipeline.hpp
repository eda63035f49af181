#pragma once

#include <map>
#include <string>
#include <vector>

#include "derval/analytic.hpp"
#include "derval/config.hpp"
#include "derval/coordination.hpp"
#include "derval/device.hpp"
#include "derval/forecast.hpp"
#include "derval/io.hpp"
#include "derval/metrics.hpp"

namespace derval {

inline constexpr const char* kToolName = "derval";
inline constexpr const char* kToolVersion = "0.3.0";

Calendar build_calendar_from_config(const CalendarConfig& cfg);

// Inputs after ingestion or synthesis: traces sorted by household id, plus
// zip-level irradiance and node-level wholesale prices mapped onto zips.
struct Population {
    Calendar cal;
    std::vector<LoadTrace> loads;
    std::map<std::string, HourlySeries> ghi_by_zip;
    std::map<std::string, HourlySeries> lmp_by_node;
    std::map<std::string, GeoPoint> zip_geo;
    std::map<std::string, GeoPoint> node_geo;
    std::map<std::string, std::string> zip_to_node;
    std::map<std::string, HourlySeries> wholesale_by_zip;
    IngestStats ingest_stats;
};

Population load_population(const RunConfig& cfg);

struct HouseholdTech {
    double z = 0.0;
    DeviceSpec spec;
    HourlySeries pv_dc;
};
std::vector<HouseholdTech> size_population(const Population& pop);

RateLibrary build_rate_library(const Population& pop, const RunConfig& cfg);

// Bills for every household under one policy.
struct PolicyRun {
    PolicyId policy = PolicyId::P1;
    std::map<std::string, PriceSchedule> schedule_by_zip;
    std::vector<const PriceSchedule*> schedule_by_household;
    std::vector<double> b_bl;
    std::vector<double> b_n;
    std::vector<double> s_n;
    std::vector<std::vector<double>> daily_bl;
    std::vector<std::vector<double>> daily_n;
    std::vector<std::string> failures;  // per household; empty string = ok
};

PolicyRun run_policy_bills(const Population& pop, const std::vector<HouseholdTech>& tech,
                           const RateLibrary& lib, PolicyId policy, const RunConfig& cfg);

struct StepReport {
    std::vector<std::string> files;
    nlohmann::json extra;
    std::vector<std::string> failures;
};

StepReport step_synth_write(const Population& pop, const RunConfig& cfg);
StepReport step_prices(const Population& pop, const RateLibrary& lib, const RunConfig& cfg);
StepReport step_savings(const Population& pop, const std::vector<HouseholdTech>& tech,
                        const std::vector<PolicyRun>& runs, const RunConfig& cfg);
StepReport step_voi(const Population& pop, const std::vector<HouseholdTech>& tech,
                    const PolicyRun& run, const RunConfig& cfg);
StepReport step_coord(const Population& pop, const std::vector<HouseholdTech>& tech,
                      const PolicyRun& run, const RunConfig& cfg);
StepReport step_analytic(const ToyParams& params, double f_step, const RunConfig& cfg);

void write_manifest(const std::string& csv_path, const std::string& command, const RunConfig& cfg,
                    const nlohmann::json& extra);

// Coordination sweep results, exposed for tests.
struct CoordCell {
    AdoptionPattern pattern;
    double t_pct = 0.0;
    double capacity_frac = 0.0;
    double total_uncoordinated = 0.0;  // T(t)
    double total_coordinated = 0.0;    // C(t)
    double vca = 0.0;
    double vca_frac = 0.0;
    struct Vci {
        double cv_pct = 0.0;
        double mean = 0.0;
        double stderr_mean = 0.0;
        double frac = 0.0;
        int n_seeds = 0;
    };
    std::vector<Vci> vci;
};

struct CoordSweep {
    double t_bl = 0.0;
    std::vector<CoordCell> cells;           // pattern-major, then t ascending
    std::vector<CoordCell> group_priced;    // optional re-priced uncoordinated totals
};

CoordSweep run_coord_sweep(const Population& pop, const std::vector<HouseholdTech>& tech,
                           const PolicyRun& run, const RunConfig& cfg);

}  // namespace derval
