#include "derval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "derval/errors.hpp"
#include "derval/rng.hpp"

namespace derval {

namespace {

using std::numbers::pi;

constexpr int kArchDaytime = 0;
constexpr int kArchEvening = 1;
constexpr int kArchFlat = 2;

double archetype_shape(int arch, int hour) {
    const double h = static_cast<double>(hour) + 0.5;
    switch (arch) {
        case kArchDaytime:
            return 0.35 + 1.10 * std::exp(-((h - 13.0) / 3.0) * ((h - 13.0) / 3.0));
        case kArchEvening:
            return 0.35 + 1.20 * std::exp(-((h - 19.5) / 2.6) * ((h - 19.5) / 2.6)) +
                   0.30 * std::exp(-((h - 7.5) / 1.8) * ((h - 7.5) / 1.8));
        default:
            return 1.0;
    }
}

// Cosine of the day-of-year angle relative to mid-July; +1 in high summer.
double summerness(const CivilDate& d) {
    static const int cum[] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
    const int doy = cum[d.month - 1] + d.day;
    return std::cos(2.0 * pi * (static_cast<double>(doy) - 196.0) / 365.25);
}

std::string padded_id(const char* prefix, int i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
    return buf;
}

HourlySeries make_ghi(const Calendar& cal, double lat_deg, double site_factor, rng::Key key) {
    HourlySeries ghi(cal.hours(), 0.0);
    const double phi = lat_deg * pi / 180.0;
    for (int j = 0; j < cal.n_days(); ++j) {
        const CivilDate date = cal.day(j).date;
        static const int cum[] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
        const int doy = cum[date.month - 1] + date.day;
        const double decl = 23.45 * (pi / 180.0) *
                            std::sin(2.0 * pi * (284.0 + static_cast<double>(doy)) / 365.0);
        const double cos_omega = std::clamp(-std::tan(phi) * std::tan(decl), -1.0, 1.0);
        const double daylength = 24.0 * std::acos(cos_omega) / pi;
        const double rise = 12.0 - daylength / 2.0;
        const double noon_alt = std::cos(phi - decl);
        const double peak = 1.02 * std::pow(std::max(noon_alt, 0.0), 1.15);
        // Bounded cloudiness, one draw per day.
        const double u = key.u01(static_cast<std::uint64_t>(j));
        const double weather = 1.0 - 0.55 * u * u;
        auto day = ghi.day(j);
        for (int h = 0; h < 24; ++h) {
            const double t = static_cast<double>(h) + 0.5;
            if (t <= rise || t >= rise + daylength) continue;
            const double s = std::sin(pi * (t - rise) / daylength);
            day[static_cast<std::size_t>(h)] =
                site_factor * weather * peak * std::pow(std::max(s, 0.0), 1.1);
        }
    }
    return ghi;
}

HourlySeries make_lmp(const Calendar& cal, rng::Key key) {
    HourlySeries lmp(cal.hours(), 0.0);  // stored in $/kWh
    const double sigma = 0.18;
    for (int j = 0; j < cal.n_days(); ++j) {
        const double season = 1.0 + 0.2 * summerness(cal.day(j).date);
        auto day = lmp.day(j);
        for (int h = 0; h < 24; ++h) {
            const double t = static_cast<double>(h) + 0.5;
            double usd_mwh = 28.0 + 18.0 * std::exp(-((t - 19.0) / 2.2) * ((t - 19.0) / 2.2)) +
                             8.0 * std::exp(-((t - 8.0) / 2.0) * ((t - 8.0) / 2.0)) -
                             14.0 * std::exp(-((t - 13.5) / 2.8) * ((t - 13.5) / 2.8));
            const std::uint64_t ctr = static_cast<std::uint64_t>(j) * 24 + static_cast<std::uint64_t>(h);
            usd_mwh *= season * std::exp(sigma * key.normal(ctr) - 0.5 * sigma * sigma);
            const double spike = key.u01(ctr + 0x10000000ULL);
            if (spike < 0.004) usd_mwh *= 3.0 + 5.0 * key.u01(ctr + 0x20000000ULL);
            day[static_cast<std::size_t>(h)] = std::max(usd_mwh, 0.0) / 1000.0;
        }
    }
    return lmp;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_households < 1) throw ConfigError("synth.n_households must be >= 1");
    if (n_zips < 1) throw ConfigError("synth.n_zips must be >= 1");
    if (n_nodes < 1) throw ConfigError("synth.n_nodes must be >= 1");
    double wsum = 0.0;
    for (double w : archetype_weights) {
        if (w < 0.0) throw ConfigError("synth.archetype_weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("synth.archetype_weights must sum to 1");
    if (!(mean_load_log_sigma >= 0.0)) throw ConfigError("synth.mean_load_log_sigma must be >= 0");
    if (!(mean_load_min_kw > 0.1)) {
        throw ConfigError("synth.mean_load_min_kw must exceed the 0.1 kW ingestion filter");
    }
    if (!(mean_load_max_kw > mean_load_min_kw)) {
        throw ConfigError("synth.mean_load_max_kw must exceed mean_load_min_kw");
    }
    if (!(noise_cv >= 0.0)) throw ConfigError("synth.noise_cv must be >= 0");
}

SynthData synth_population(const SynthConfig& cfg, const Calendar& cal) {
    cfg.validate();
    SynthData out;
    const rng::Key root = rng::master(cfg.seed).child("synth");

    for (int z = 0; z < cfg.n_zips; ++z) {
        const std::string zip = padded_id("Z", z, 3);
        const double frac = cfg.n_zips > 1 ? static_cast<double>(z) / (cfg.n_zips - 1) : 0.5;
        out.zip_geo.emplace(zip, GeoPoint{34.0 + 6.0 * frac, -122.5 + 3.0 * frac});
        const rng::Key zkey = root.child("zip").child(static_cast<std::uint64_t>(z));
        const double site = 0.95 + 0.10 * zkey.u01(0);
        out.ghi_by_zip.emplace(zip, make_ghi(cal, 34.0 + 6.0 * frac, site, zkey.child("ghi")));
    }
    for (int k = 0; k < cfg.n_nodes; ++k) {
        const std::string node = padded_id("N", k, 2);
        const double frac = cfg.n_nodes > 1 ? static_cast<double>(k) / (cfg.n_nodes - 1) : 0.5;
        out.node_geo.emplace(node, GeoPoint{34.3 + 5.6 * frac, -122.3 + 2.8 * frac});
        const rng::Key nkey = root.child("node").child(static_cast<std::uint64_t>(k));
        out.lmp_by_node.emplace(node, make_lmp(cal, nkey));
    }

    const double noise_sigma = std::sqrt(std::log1p(cfg.noise_cv * cfg.noise_cv));
    out.loads.resize(static_cast<std::size_t>(cfg.n_households));
    for (int i = 0; i < cfg.n_households; ++i) {
        const rng::Key hkey = root.child("household").child(static_cast<std::uint64_t>(i));
        LoadTrace& trace = out.loads[static_cast<std::size_t>(i)];
        trace.household_id = padded_id("H", i, 5);
        trace.zip = padded_id("Z", i % cfg.n_zips, 3);

        const double mean_kw = std::clamp(
            std::exp(cfg.mean_load_log_mu + cfg.mean_load_log_sigma * hkey.normal(0)),
            cfg.mean_load_min_kw, cfg.mean_load_max_kw);
        const double arch_draw = hkey.u01(1);
        int arch = kArchFlat;
        if (arch_draw < cfg.archetype_weights[0]) {
            arch = kArchDaytime;
        } else if (arch_draw < cfg.archetype_weights[0] + cfg.archetype_weights[1]) {
            arch = kArchEvening;
        }
        const double season_amp = arch == kArchDaytime ? 0.20 : (arch == kArchEvening ? 0.10 : 0.05);
        const double weekend_scale = arch == kArchDaytime ? 1.08 : (arch == kArchEvening ? 1.05 : 1.0);

        trace.kwh = HourlySeries(cal.hours(), 0.0);
        const rng::Key noise_key = hkey.child("noise");
        for (int j = 0; j < cal.n_days(); ++j) {
            const DayInfo& info = cal.day(j);
            const double season = 1.0 + season_amp * summerness(info.date);
            const double weekend = info.is_weekend ? weekend_scale : 1.0;
            auto day = trace.kwh.day(j);
            for (int h = 0; h < 24; ++h) {
                const std::uint64_t ctr =
                    static_cast<std::uint64_t>(j) * 24 + static_cast<std::uint64_t>(h);
                const double noise =
                    std::exp(noise_sigma * noise_key.normal(ctr) - 0.5 * noise_sigma * noise_sigma);
                day[static_cast<std::size_t>(h)] = archetype_shape(arch, h) * season * weekend * noise;
            }
        }
        const double realized_mean = trace.kwh.mean();
        const double rescale = mean_kw / realized_mean;
        for (double& v : trace.kwh.v) v *= rescale;
    }
    return out;
}

}  // namespace derval
