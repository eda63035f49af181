#pragma once

#include "derval/calendar.hpp"

namespace derval {

inline constexpr double kInverterEfficiency = 0.92;
inline constexpr double kRoundTripEfficiency = 0.92;
inline constexpr double kDailySelfDischargeRetention = 0.95;
inline constexpr double kPowerwallRateRatio = 5.0 / 13.5;  // kW of rate per kWh of capacity

// PV size z (kW), storage capacity z (kWh), and the storage power/efficiency
// parameters derived from it.
struct DeviceSpec {
    double pv_kw = 0.0;
    double capacity_kwh = 0.0;
    double charge_kw = 0.0;
    double discharge_kw = 0.0;
    double eta_inverter = kInverterEfficiency;
    double eta_charge = 1.0;
    double eta_discharge = 1.0;
    double eta_self_hourly = 1.0;  // retention per hour
};

// Net-zero sizing: z = sum(L) / (eta_I * sum(V)).
double net_zero_size(const HourlySeries& load_kwh, const HourlySeries& ghi, double eta_inverter);

// Powerwall-scaled device for a net-zero PV of z kW: capacity z kWh and
// charge/discharge rates z*5/13.5 kW.
DeviceSpec make_device(double z);

// DC-side PV generation E = z*V; the inverter is applied downstream in the
// net load.
HourlySeries pv_generation(double z, const HourlySeries& ghi);

}  // namespace derval
