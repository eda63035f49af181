#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "derval/calendar.hpp"
#include "derval/io.hpp"

namespace derval {

// Stand-in population for the withheld smart-meter dataset. Every household
// is a mix of three consumption archetypes (daytime-peaking, evening-peaking,
// flat) with a log-normally distributed mean load; irradiance is a clear-sky
// diurnal/seasonal curve per zip with bounded multiplicative weather noise;
// wholesale prices are a duck-curve-shaped nodal series with spikes.
struct SynthConfig {
    int n_households = 200;
    int n_zips = 5;
    int n_nodes = 3;
    // daytime-peaking, evening-peaking, flat
    std::array<double, 3> archetype_weights{0.35, 0.45, 0.20};
    double mean_load_log_mu = -0.105360515657826301;  // ln(0.9)
    double mean_load_log_sigma = 0.85;
    double mean_load_min_kw = 0.11;
    double mean_load_max_kw = 25.0;
    double noise_cv = 0.25;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthData {
    std::vector<LoadTrace> loads;  // sorted by household_id
    std::map<std::string, HourlySeries> ghi_by_zip;      // kWh/m2
    std::map<std::string, HourlySeries> lmp_by_node;     // $/kWh
    std::map<std::string, GeoPoint> zip_geo;
    std::map<std::string, GeoPoint> node_geo;
};

// Deterministic for a fixed seed regardless of thread count; every generated
// trace passes the ingestion filters by construction.
SynthData synth_population(const SynthConfig& cfg, const Calendar& cal);

}  // namespace derval
