#include <doctest.h>

#include <cmath>

#include "derval/device.hpp"
#include "derval/errors.hpp"
#include "derval/synth.hpp"

using namespace derval;

TEST_CASE("net_zero_size follows the sizing identity") {
    HourlySeries load(48, 0.0), ghi(48, 0.0);
    load.v[0] = 920.0;
    ghi.v[0] = 1000.0;
    CHECK(net_zero_size(load, ghi, 0.92) == doctest::Approx(1.0).epsilon(1e-12));

    load.v[0] = 4600.0;
    ghi.v[0] = 2000.0;
    CHECK(net_zero_size(load, ghi, 0.92) == doctest::Approx(2.5).epsilon(1e-12));

    HourlySeries dark(48, 0.0);
    CHECK_THROWS_AS(net_zero_size(load, dark, 0.92), DataError);
}

TEST_CASE("make_device scales the storage to the PV size") {
    const DeviceSpec big = make_device(13.5);
    CHECK(big.charge_kw == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(big.discharge_kw == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(big.capacity_kwh == doctest::Approx(13.5));

    const DeviceSpec s = make_device(5.0);
    CHECK(s.capacity_kwh == doctest::Approx(5.0));
    CHECK(s.charge_kw == doctest::Approx(5.0 * 5.0 / 13.5).epsilon(1e-12));

    CHECK(s.eta_charge * s.eta_discharge == doctest::Approx(0.92).epsilon(1e-9));
    CHECK(s.eta_charge == doctest::Approx(std::sqrt(0.92)).epsilon(1e-9));
    CHECK(std::pow(s.eta_self_hourly, 24.0) == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(s.eta_inverter == 0.92);

    CHECK_THROWS_AS(make_device(0.0), DataError);
    CHECK_THROWS_AS(make_device(-1.0), DataError);
}

TEST_CASE("pv_generation is elementwise z*V") {
    HourlySeries ghi(24, 0.5);
    ghi.v[0] = 0.0;  // night
    const HourlySeries e = pv_generation(2.0, ghi);
    CHECK(e.v[0] == 0.0);
    for (std::size_t h = 1; h < 24; ++h) CHECK(e.v[h] == doctest::Approx(1.0));

    const HourlySeries none = pv_generation(0.0, ghi);
    for (double v : none.v) CHECK(v == 0.0);
}

TEST_CASE("net-zero identity holds across a synthetic population") {
    const Calendar cal = Calendar::build(CivilDate{2011, 11, 1}, 366, {});
    SynthConfig cfg;
    cfg.n_households = 50;
    cfg.seed = 3;
    const SynthData data = synth_population(cfg, cal);
    for (const LoadTrace& t : data.loads) {
        const HourlySeries& ghi = data.ghi_by_zip.at(t.zip);
        const double z = net_zero_size(t.kwh, ghi, kInverterEfficiency);
        const double annual_ac = kInverterEfficiency * z * ghi.sum();
        const double annual_load = t.kwh.sum();
        REQUIRE(std::abs(annual_ac - annual_load) <= 1e-9 * annual_load);
        const DeviceSpec spec = make_device(z);
        REQUIRE(spec.capacity_kwh == z);
        REQUIRE(spec.charge_kw == doctest::Approx(z * 5.0 / 13.5).epsilon(1e-12));
    }
}
