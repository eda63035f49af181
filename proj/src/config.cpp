#include "derval/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "derval/errors.hpp"

namespace derval {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

TouLevels tou_from_json(const json& j, const std::string& where, TouLevels defaults) {
    check_keys(j, where, {"summer_peak", "summer_off", "winter_peak", "winter_off"});
    TouLevels out = defaults;
    out.summer_peak = j.value("summer_peak", out.summer_peak);
    out.summer_off = j.value("summer_off", out.summer_off);
    out.winter_peak = j.value("winter_peak", out.winter_peak);
    out.winter_off = j.value("winter_off", out.winter_off);
    return out;
}

json tou_to_json(const TouLevels& t) {
    return json{{"summer_peak", t.summer_peak},
                {"summer_off", t.summer_off},
                {"winter_peak", t.winter_peak},
                {"winter_off", t.winter_off}};
}

}  // namespace

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    // A manifest embeds the resolved config under "config".
    const json& root = doc.contains("config") ? doc.at("config") : doc;
    check_keys(root, "config",
               {"out_dir", "seed", "threads", "solver", "tie_break", "dump_dispatch", "calendar",
                "data", "synth", "policies", "voi", "coord", "bootstrap", "rates"});

    RunConfig cfg;
    cfg.out_dir = root.value("out_dir", cfg.out_dir);
    cfg.seed = root.value("seed", cfg.seed);
    cfg.threads = root.value("threads", cfg.threads);
    cfg.solver = root.value("solver", cfg.solver);
    cfg.tie_break = root.value("tie_break", cfg.tie_break);
    cfg.dump_dispatch = root.value("dump_dispatch", cfg.dump_dispatch);

    if (root.contains("calendar")) {
        const json& c = root.at("calendar");
        check_keys(c, "calendar", {"start", "n_days", "holidays_file"});
        cfg.calendar.start = c.value("start", cfg.calendar.start);
        cfg.calendar.n_days = c.value("n_days", cfg.calendar.n_days);
        cfg.calendar.holidays_file = c.value("holidays_file", cfg.calendar.holidays_file);
    }
    if (root.contains("data")) {
        const json& d = root.at("data");
        check_keys(d, "data", {"loads", "irradiance", "lmp", "nodes", "zips"});
        DataPaths paths;
        paths.loads = d.value("loads", "");
        paths.irradiance = d.value("irradiance", "");
        paths.lmp = d.value("lmp", "");
        paths.nodes = d.value("nodes", "");
        paths.zips = d.value("zips", "");
        cfg.data = paths;
    }
    if (root.contains("synth")) {
        const json& s = root.at("synth");
        check_keys(s, "synth",
                   {"n_households", "n_zips", "n_nodes", "archetype_weights", "mean_load_log_mu",
                    "mean_load_log_sigma", "mean_load_min_kw", "mean_load_max_kw", "noise_cv",
                    "seed"});
        SynthConfig sc;
        sc.n_households = s.value("n_households", sc.n_households);
        sc.n_zips = s.value("n_zips", sc.n_zips);
        sc.n_nodes = s.value("n_nodes", sc.n_nodes);
        if (s.contains("archetype_weights")) {
            const auto w = s.at("archetype_weights").get<std::vector<double>>();
            if (w.size() != 3) throw ConfigError("synth.archetype_weights must have 3 entries");
            std::copy(w.begin(), w.end(), sc.archetype_weights.begin());
        }
        sc.mean_load_log_mu = s.value("mean_load_log_mu", sc.mean_load_log_mu);
        sc.mean_load_log_sigma = s.value("mean_load_log_sigma", sc.mean_load_log_sigma);
        sc.mean_load_min_kw = s.value("mean_load_min_kw", sc.mean_load_min_kw);
        sc.mean_load_max_kw = s.value("mean_load_max_kw", sc.mean_load_max_kw);
        sc.noise_cv = s.value("noise_cv", sc.noise_cv);
        sc.seed = s.value("seed", std::uint64_t{0});  // 0 = inherit the run seed
        cfg.synth = sc;
    }
    if (root.contains("policies")) {
        cfg.policies = root.at("policies").get<std::vector<std::string>>();
    }
    if (root.contains("voi")) {
        const json& v = root.at("voi");
        check_keys(v, "voi", {"policy", "cv_grid_pct", "n_seeds"});
        cfg.voi.policy = v.value("policy", cfg.voi.policy);
        if (v.contains("cv_grid_pct")) cfg.voi.cv_grid_pct = v.at("cv_grid_pct").get<std::vector<double>>();
        cfg.voi.n_seeds = v.value("n_seeds", cfg.voi.n_seeds);
    }
    if (root.contains("coord")) {
        const json& c = root.at("coord");
        check_keys(c, "coord",
                   {"policy", "t_grid_pct", "patterns", "cv_grid_pct", "n_seeds",
                    "random_pattern_seed", "group_self_discharge", "scaling_law",
                    "report_group_priced_total"});
        cfg.coord.policy = c.value("policy", cfg.coord.policy);
        if (c.contains("t_grid_pct")) cfg.coord.t_grid_pct = c.at("t_grid_pct").get<std::vector<double>>();
        if (c.contains("patterns")) cfg.coord.patterns = c.at("patterns").get<std::vector<std::string>>();
        if (c.contains("cv_grid_pct")) cfg.coord.cv_grid_pct = c.at("cv_grid_pct").get<std::vector<double>>();
        cfg.coord.n_seeds = c.value("n_seeds", cfg.coord.n_seeds);
        cfg.coord.random_pattern_seed = c.value("random_pattern_seed", cfg.coord.random_pattern_seed);
        cfg.coord.group_self_discharge = c.value("group_self_discharge", cfg.coord.group_self_discharge);
        cfg.coord.report_group_priced_total =
            c.value("report_group_priced_total", cfg.coord.report_group_priced_total);
        if (c.contains("scaling_law")) {
            const json& w = c.at("scaling_law");
            check_keys(w, "coord.scaling_law", {"a", "b", "cv_min", "cv_max"});
            cfg.coord.scaling_law.a = w.value("a", cfg.coord.scaling_law.a);
            cfg.coord.scaling_law.b = w.value("b", cfg.coord.scaling_law.b);
            cfg.coord.scaling_law.cv_min = w.value("cv_min", cfg.coord.scaling_law.cv_min);
            cfg.coord.scaling_law.cv_max = w.value("cv_max", cfg.coord.scaling_law.cv_max);
        }
    }
    if (root.contains("bootstrap")) {
        const json& b = root.at("bootstrap");
        check_keys(b, "bootstrap", {"b", "alpha"});
        cfg.bootstrap.b = b.value("b", cfg.bootstrap.b);
        cfg.bootstrap.alpha = b.value("alpha", cfg.bootstrap.alpha);
    }
    if (root.contains("rates")) {
        const json& r = root.at("rates");
        check_keys(r, "rates", {"retail_tou", "flipped_tou", "sell_discount"});
        if (r.contains("retail_tou")) {
            cfg.rates.retail_tou = tou_from_json(r.at("retail_tou"), "rates.retail_tou", cfg.rates.retail_tou);
        }
        if (r.contains("flipped_tou")) {
            cfg.rates.flipped_tou = tou_from_json(r.at("flipped_tou"), "rates.flipped_tou", cfg.rates.flipped_tou);
        }
        cfg.rates.sell_discount = r.value("sell_discount", cfg.rates.sell_discount);
    }

    // Resolve the inherited synth seed so manifests reproduce exactly.
    if (cfg.synth && cfg.synth->seed == 0) cfg.synth->seed = cfg.seed;
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return config_from_json(doc);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json doc;
    doc["out_dir"] = cfg.out_dir;
    doc["seed"] = cfg.seed;
    doc["threads"] = cfg.threads;
    doc["solver"] = cfg.solver;
    doc["tie_break"] = cfg.tie_break;
    doc["dump_dispatch"] = cfg.dump_dispatch;
    doc["calendar"] = {{"start", cfg.calendar.start},
                       {"n_days", cfg.calendar.n_days},
                       {"holidays_file", cfg.calendar.holidays_file}};
    if (cfg.data) {
        doc["data"] = {{"loads", cfg.data->loads},
                       {"irradiance", cfg.data->irradiance},
                       {"lmp", cfg.data->lmp},
                       {"nodes", cfg.data->nodes},
                       {"zips", cfg.data->zips}};
    }
    if (cfg.synth) {
        const SynthConfig& s = *cfg.synth;
        doc["synth"] = {{"n_households", s.n_households},
                        {"n_zips", s.n_zips},
                        {"n_nodes", s.n_nodes},
                        {"archetype_weights", s.archetype_weights},
                        {"mean_load_log_mu", s.mean_load_log_mu},
                        {"mean_load_log_sigma", s.mean_load_log_sigma},
                        {"mean_load_min_kw", s.mean_load_min_kw},
                        {"mean_load_max_kw", s.mean_load_max_kw},
                        {"noise_cv", s.noise_cv},
                        {"seed", s.seed}};
    }
    doc["policies"] = cfg.policies;
    doc["voi"] = {{"policy", cfg.voi.policy},
                  {"cv_grid_pct", cfg.voi.cv_grid_pct},
                  {"n_seeds", cfg.voi.n_seeds}};
    doc["coord"] = {{"policy", cfg.coord.policy},
                    {"t_grid_pct", cfg.coord.t_grid_pct},
                    {"patterns", cfg.coord.patterns},
                    {"cv_grid_pct", cfg.coord.cv_grid_pct},
                    {"n_seeds", cfg.coord.n_seeds},
                    {"random_pattern_seed", cfg.coord.random_pattern_seed},
                    {"group_self_discharge", cfg.coord.group_self_discharge},
                    {"report_group_priced_total", cfg.coord.report_group_priced_total},
                    {"scaling_law",
                     {{"a", cfg.coord.scaling_law.a},
                      {"b", cfg.coord.scaling_law.b},
                      {"cv_min", cfg.coord.scaling_law.cv_min},
                      {"cv_max", cfg.coord.scaling_law.cv_max}}}};
    doc["bootstrap"] = {{"b", cfg.bootstrap.b}, {"alpha", cfg.bootstrap.alpha}};
    doc["rates"] = {{"retail_tou", tou_to_json(cfg.rates.retail_tou)},
                    {"flipped_tou", tou_to_json(cfg.rates.flipped_tou)},
                    {"sell_discount", cfg.rates.sell_discount}};
    return doc;
}

std::vector<Diagnostic> validate_config(const RunConfig& cfg) {
    std::vector<Diagnostic> out;
    auto add = [&](std::string path, std::string msg) {
        out.push_back(Diagnostic{std::move(path), std::move(msg)});
    };

    if (cfg.out_dir.empty()) add("out_dir", "must not be empty");
    if (cfg.threads < 0) add("threads", "must be >= 0 (0 = auto)");
    try {
        parse_solver(cfg.solver);
    } catch (const ConfigError& e) {
        add("solver", e.what());
    }
    if (!(cfg.tie_break >= 0.0)) add("tie_break", "must be >= 0");

    if (cfg.calendar.n_days != 365 && cfg.calendar.n_days != 366) {
        add("calendar.n_days", "must be 365 or 366");
    }
    try {
        parse_date(cfg.calendar.start);
    } catch (const ConfigError& e) {
        add("calendar.start", e.what());
    }

    if (!cfg.data && !cfg.synth) {
        add("data|synth", "at least one of real-data paths or a synth config is required");
    }
    if (cfg.data) {
        auto need = [&](const std::string& v, const char* field) {
            if (v.empty()) add(std::string("data.") + field, "path required when data block present");
        };
        need(cfg.data->loads, "loads");
        need(cfg.data->irradiance, "irradiance");
        need(cfg.data->lmp, "lmp");
        need(cfg.data->nodes, "nodes");
        need(cfg.data->zips, "zips");
    }
    if (cfg.synth) {
        try {
            cfg.synth->validate();
        } catch (const ConfigError& e) {
            add("synth", e.what());
        }
    }

    if (cfg.policies.empty()) add("policies", "must list at least one policy");
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        try {
            parse_policy(cfg.policies[i]);
        } catch (const ConfigError& e) {
            add("policies[" + std::to_string(i) + "]", e.what());
        }
    }

    try {
        parse_policy(cfg.voi.policy);
    } catch (const ConfigError& e) {
        add("voi.policy", e.what());
    }
    if (cfg.voi.cv_grid_pct.size() < 2) add("voi.cv_grid_pct", "needs at least 2 points");
    bool has_zero = false;
    for (std::size_t i = 0; i < cfg.voi.cv_grid_pct.size(); ++i) {
        const double v = cfg.voi.cv_grid_pct[i];
        if (v < 0.0) add("voi.cv_grid_pct[" + std::to_string(i) + "]", "cv must be >= 0");
        if (v == 0.0) has_zero = true;
    }
    if (!cfg.voi.cv_grid_pct.empty() && !has_zero) add("voi.cv_grid_pct", "grid must contain 0");
    if (cfg.voi.n_seeds < 1) add("voi.n_seeds", "must be >= 1");

    try {
        parse_policy(cfg.coord.policy);
    } catch (const ConfigError& e) {
        add("coord.policy", e.what());
    }
    for (std::size_t i = 0; i < cfg.coord.t_grid_pct.size(); ++i) {
        const double t = cfg.coord.t_grid_pct[i];
        if (t < 0.0 || t > 100.0) {
            add("coord.t_grid_pct[" + std::to_string(i) + "]", "adoption level must be in [0, 100]");
        }
    }
    if (cfg.coord.t_grid_pct.empty()) add("coord.t_grid_pct", "must not be empty");
    if (cfg.coord.patterns.empty()) add("coord.patterns", "must not be empty");
    for (std::size_t i = 0; i < cfg.coord.patterns.size(); ++i) {
        try {
            parse_pattern(cfg.coord.patterns[i]);
        } catch (const ConfigError& e) {
            add("coord.patterns[" + std::to_string(i) + "]", e.what());
        }
    }
    for (std::size_t i = 0; i < cfg.coord.cv_grid_pct.size(); ++i) {
        if (cfg.coord.cv_grid_pct[i] < 0.0) {
            add("coord.cv_grid_pct[" + std::to_string(i) + "]", "cv must be >= 0");
        }
    }
    if (cfg.coord.n_seeds < 1) add("coord.n_seeds", "must be >= 1");
    try {
        cfg.coord.scaling_law.validate();
    } catch (const ConfigError& e) {
        add("coord.scaling_law", e.what());
    }

    if (cfg.bootstrap.b < 1) add("bootstrap.b", "must be >= 1");
    if (!(cfg.bootstrap.alpha > 0.0 && cfg.bootstrap.alpha < 1.0)) {
        add("bootstrap.alpha", "must be in (0, 1)");
    }

    auto check_tou = [&](const TouLevels& t, const char* name) {
        if (t.summer_peak < 0 || t.summer_off < 0 || t.winter_peak < 0 || t.winter_off < 0) {
            add(std::string("rates.") + name, "prices must be >= 0");
        }
    };
    check_tou(cfg.rates.retail_tou, "retail_tou");
    check_tou(cfg.rates.flipped_tou, "flipped_tou");
    if (!(cfg.rates.sell_discount >= 0.0 && cfg.rates.sell_discount <= 1.0)) {
        add("rates.sell_discount", "must be in [0, 1]");
    }
    return out;
}

void require_valid(const RunConfig& cfg) {
    const auto diags = validate_config(cfg);
    if (diags.empty()) return;
    std::string msg = "invalid configuration:";
    for (const Diagnostic& d : diags) msg += "\n  " + d.path + ": " + d.message;
    throw ConfigError(msg);
}

std::uint64_t config_hash(const RunConfig& cfg) {
    return rng::hash_str(config_to_json(cfg).dump());
}

}  // namespace derval
