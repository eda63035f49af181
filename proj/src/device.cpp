#include "derval/device.hpp"

#include <cmath>
#include <string>

#include "derval/errors.hpp"

namespace derval {

double net_zero_size(const HourlySeries& load_kwh, const HourlySeries& ghi, double eta_inverter) {
    const double total_load = load_kwh.sum();
    const double total_ghi = ghi.sum();
    if (total_ghi <= 0.0) throw DataError("net_zero_size: irradiance series sums to zero");
    if (total_load <= 0.0) throw DataError("net_zero_size: load series sums to zero");
    return total_load / (eta_inverter * total_ghi);
}

DeviceSpec make_device(double z) {
    if (!(z > 0.0)) throw DataError("make_device: PV size must be positive, got " + std::to_string(z));
    DeviceSpec spec;
    spec.pv_kw = z;
    spec.capacity_kwh = z;
    spec.charge_kw = z * kPowerwallRateRatio;
    spec.discharge_kw = z * kPowerwallRateRatio;
    spec.eta_inverter = kInverterEfficiency;
    spec.eta_charge = std::sqrt(kRoundTripEfficiency);
    spec.eta_discharge = std::sqrt(kRoundTripEfficiency);
    spec.eta_self_hourly = std::pow(kDailySelfDischargeRetention, 1.0 / 24.0);
    return spec;
}

HourlySeries pv_generation(double z, const HourlySeries& ghi) {
    HourlySeries e(ghi.hours());
    for (std::size_t h = 0; h < ghi.hours(); ++h) e.v[h] = z * ghi.v[h];
    return e;
}

}  // namespace derval
