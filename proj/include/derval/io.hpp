#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "derval/calendar.hpp"

namespace derval {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Great-circle distance in km.
double haversine_km(GeoPoint a, GeoPoint b);

// Each zip maps to the nearest node; ties go to the lexicographically
// smallest node_id.
std::map<std::string, std::string> map_zip_to_node(const std::map<std::string, GeoPoint>& zips,
                                                   const std::map<std::string, GeoPoint>& nodes);

struct IngestStats {
    int households_read = 0;
    int dropped_low_mean = 0;
    int dropped_zero_heavy = 0;
};

// loads.csv: household_id,zip,hour_index,kwh. Households failing the mean or
// zero-fraction filters are dropped and counted. Output is sorted by
// household_id.
std::vector<LoadTrace> load_traces_csv(const std::string& path, const Calendar& cal,
                                       IngestStats* stats = nullptr);

// irradiance.csv: zip,hour_index,ghi_kwh_m2.
std::map<std::string, HourlySeries> load_irradiance_csv(const std::string& path, const Calendar& cal);

// lmp.csv: node_id,hour_index,usd_per_mwh. Converted to $/kWh; negative
// prices clamped to zero.
std::map<std::string, HourlySeries> load_lmp_csv(const std::string& path, const Calendar& cal);

// nodes.csv / zips.csv: id,lat,lon.
std::map<std::string, GeoPoint> load_geo_csv(const std::string& path, const std::string& id_column);

void write_loads_csv(const std::string& path, const std::vector<LoadTrace>& traces);
void write_irradiance_csv(const std::string& path, const std::map<std::string, HourlySeries>& by_zip);
void write_lmp_csv(const std::string& path, const std::map<std::string, HourlySeries>& by_node_usd_kwh);
void write_geo_csv(const std::string& path, const std::string& id_column,
                   const std::map<std::string, GeoPoint>& geo);

// Shortest round-trip decimal formatting, used for all CSV numbers.
std::string format_double(double v);

// Simple CSV writer that accumulates rows and writes atomically at the end.
class CsvWriter {
public:
    CsvWriter(std::string path, std::string header);
    void row(const std::vector<std::string>& cells);
    void close();  // writes the file
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string buffer_;
    bool closed_ = false;
};

std::uint64_t fnv1a_file_hash(const std::string& path);

}  // namespace derval
