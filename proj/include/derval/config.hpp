#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "derval/coordination.hpp"
#include "derval/synth.hpp"
#include "derval/tariffs.hpp"

#include <json.hpp>

namespace derval {

struct CalendarConfig {
    std::string start = "2011-11-01";
    int n_days = 366;
    std::string holidays_file;  // empty = built-in US federal list
};

struct DataPaths {
    std::string loads;
    std::string irradiance;
    std::string lmp;
    std::string nodes;
    std::string zips;
};

struct VoiConfig {
    std::string policy = "P1";
    std::vector<double> cv_grid_pct = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    int n_seeds = 5;
};

struct CoordConfig {
    std::string policy = "P1";
    std::vector<double> t_grid_pct = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<std::string> patterns = {"forward", "reverse", "random"};
    std::vector<double> cv_grid_pct = {20, 40, 60, 80, 100};
    int n_seeds = 30;
    std::uint64_t random_pattern_seed = 1;
    bool group_self_discharge = true;
    ScalingLaw scaling_law;
    bool report_group_priced_total = true;
};

struct BootstrapConfig {
    int b = 1000;
    double alpha = 0.05;
};

struct RateOverrides {
    TouLevels retail_tou = kRetailTouLevels;
    TouLevels flipped_tou = kFlippedTouLevels;
    double sell_discount = kSellDiscountFactor;
};

struct RunConfig {
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = auto
    std::string solver = "pwl";
    double tie_break = 1e-7;
    bool dump_dispatch = false;  // per-hour schedule CSVs from the savings step
    CalendarConfig calendar;
    std::optional<DataPaths> data;
    std::optional<SynthConfig> synth;
    std::vector<std::string> policies = {"P1", "P2", "P3", "P4"};
    VoiConfig voi;
    CoordConfig coord;
    BootstrapConfig bootstrap;
    RateOverrides rates;
};

struct Diagnostic {
    std::string path;  // config field, e.g. "coord.t_grid_pct[3]"
    std::string message;
};

// Parses a config JSON document. A manifest file (with a "config" object) is
// accepted transparently so a run can be reproduced from its manifest.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const RunConfig& cfg);

// Structural validation: every violated invariant with the offending field.
std::vector<Diagnostic> validate_config(const RunConfig& cfg);

// Throws ConfigError listing all diagnostics if any.
void require_valid(const RunConfig& cfg);

std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace derval
