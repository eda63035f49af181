#include <doctest.h>

#include "derval/config.hpp"
#include "derval/errors.hpp"

using namespace derval;

TEST_CASE("default config with a synth block validates cleanly") {
    RunConfig cfg;
    cfg.synth = SynthConfig{};
    cfg.synth->seed = cfg.seed;
    CHECK(validate_config(cfg).empty());
}

TEST_CASE("validate reports field paths for violations") {
    RunConfig cfg;
    cfg.synth = SynthConfig{};
    cfg.coord.t_grid_pct = {0, 50, 120};
    cfg.policies.clear();
    const auto diags = validate_config(cfg);
    bool saw_tgrid = false, saw_policies = false;
    for (const Diagnostic& d : diags) {
        if (d.path == "coord.t_grid_pct[2]") saw_tgrid = true;
        if (d.path == "policies") saw_policies = true;
    }
    CHECK(saw_tgrid);
    CHECK(saw_policies);
}

TEST_CASE("missing data and synth blocks is a diagnostic") {
    RunConfig cfg;
    const auto diags = validate_config(cfg);
    REQUIRE_FALSE(diags.empty());
    bool found = false;
    for (const Diagnostic& d : diags) {
        if (d.path == "data|synth") found = true;
    }
    CHECK(found);
}

TEST_CASE("config json round-trips and hashes stably") {
    RunConfig cfg;
    cfg.seed = 42;
    cfg.synth = SynthConfig{};
    cfg.synth->n_households = 17;
    cfg.synth->seed = 42;
    cfg.coord.cv_grid_pct = {10, 50};
    cfg.rates.sell_discount = 0.75;

    const nlohmann::json j = config_to_json(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(cfg));

    RunConfig other = cfg;
    other.seed = 43;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("unknown keys and manifest wrappers are handled") {
    nlohmann::json doc{{"seed", 9}, {"synth", {{"n_households", 5}}}};
    const RunConfig cfg = config_from_json(doc);
    CHECK(cfg.seed == 9);
    CHECK(cfg.synth->n_households == 5);
    CHECK(cfg.synth->seed == 9);  // inherited

    nlohmann::json manifest{{"file", "savings.csv"}, {"config", config_to_json(cfg)}};
    const RunConfig from_manifest = config_from_json(manifest);
    CHECK(config_hash(from_manifest) == config_hash(cfg));

    nlohmann::json typo{{"sede", 9}};
    CHECK_THROWS_AS(config_from_json(typo), ConfigError);
}
