#include "derval/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "derval/errors.hpp"

namespace derval {

double haversine_km(GeoPoint a, GeoPoint b) {
    constexpr double kEarthRadiusKm = 6371.0088;
    const double deg = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * deg;
    const double dlon = (b.lon - a.lon) * deg;
    const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * deg) * std::cos(b.lat * deg) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

std::map<std::string, std::string> map_zip_to_node(const std::map<std::string, GeoPoint>& zips,
                                                   const std::map<std::string, GeoPoint>& nodes) {
    if (nodes.empty()) throw DataError("map_zip_to_node: node set is empty");
    if (zips.empty()) throw DataError("map_zip_to_node: zip set is empty");
    std::map<std::string, std::string> out;
    for (const auto& [zip, zgeo] : zips) {
        const std::string* best_id = nullptr;
        double best_dist = 0.0;
        for (const auto& [node, ngeo] : nodes) {  // std::map order = lexicographic, so ties keep
            const double d = haversine_km(zgeo, ngeo);  // the smallest node_id
            if (best_id == nullptr || d < best_dist) {
                best_id = &node;
                best_dist = d;
            }
        }
        out.emplace(zip, *best_id);
    }
    return out;
}

namespace {

struct CsvReader {
    std::ifstream in;
    std::string path;
    int lineno = 0;
    std::string line;

    explicit CsvReader(const std::string& p) : in(p), path(p) {
        if (!in) throw DataError("cannot open " + p);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + msg);
    }

    bool next(std::vector<std::string>& cells) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            cells.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                cells.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            return true;
        }
        return false;
    }

    void expect_header(const std::string& header) {
        std::vector<std::string> cells;
        if (!next(cells)) fail("empty file, expected header '" + header + "'");
        if (line != header) fail("bad header '" + line + "', expected '" + header + "'");
    }

    double parse_num(const std::string& cell) const {
        double v = 0.0;
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail("malformed number '" + cell + "'");
        return v;
    }

    long parse_int(const std::string& cell) const {
        long v = 0;
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail("malformed integer '" + cell + "'");
        return v;
    }
};

// Reads an id-keyed hourly series file with columns id,hour_index,value.
std::map<std::string, HourlySeries> load_series_csv(const std::string& path, const Calendar& cal,
                                                    const std::string& header, bool clamp_negative,
                                                    double scale) {
    CsvReader reader(path);
    reader.expect_header(header);
    const std::size_t hours = cal.hours();
    std::map<std::string, HourlySeries> out;
    std::map<std::string, std::vector<bool>> seen;
    std::vector<std::string> cells;
    while (reader.next(cells)) {
        if (cells.size() != 3) reader.fail("expected 3 columns");
        const long h = reader.parse_int(cells[1]);
        if (h < 0 || static_cast<std::size_t>(h) >= hours) {
            reader.fail("hour_index " + cells[1] + " out of range [0, " + std::to_string(hours) + ")");
        }
        double v = reader.parse_num(cells[2]) * scale;
        if (clamp_negative) v = std::max(v, 0.0);
        auto [it, inserted] = out.try_emplace(cells[0], hours, 0.0);
        auto [sit, _] = seen.try_emplace(cells[0], hours, false);
        if (sit->second[static_cast<std::size_t>(h)]) {
            reader.fail("duplicate hour " + cells[1] + " for id " + cells[0]);
        }
        sit->second[static_cast<std::size_t>(h)] = true;
        it->second.v[static_cast<std::size_t>(h)] = v;
    }
    for (const auto& [id, flags] : seen) {
        const auto missing = std::find(flags.begin(), flags.end(), false);
        if (missing != flags.end()) {
            throw DataError(path + ": id " + id + " is missing hour " +
                            std::to_string(missing - flags.begin()));
        }
    }
    if (out.empty()) throw DataError(path + ": no data rows");
    return out;
}

}  // namespace

std::vector<LoadTrace> load_traces_csv(const std::string& path, const Calendar& cal,
                                       IngestStats* stats) {
    CsvReader reader(path);
    reader.expect_header("household_id,zip,hour_index,kwh");
    const std::size_t hours = cal.hours();

    struct Partial {
        std::string zip;
        HourlySeries kwh;
        std::vector<bool> seen;
        std::size_t count = 0;
    };
    std::map<std::string, Partial> partial;
    std::vector<std::string> cells;
    while (reader.next(cells)) {
        if (cells.size() != 4) reader.fail("expected 4 columns");
        const long h = reader.parse_int(cells[2]);
        if (h < 0 || static_cast<std::size_t>(h) >= hours) {
            reader.fail("hour_index " + cells[2] + " out of range [0, " + std::to_string(hours) + ")");
        }
        const double v = reader.parse_num(cells[3]);
        if (v < 0.0) reader.fail("negative kwh reading");
        auto [it, inserted] = partial.try_emplace(cells[0]);
        Partial& rec = it->second;
        if (inserted) {
            rec.zip = cells[1];
            rec.kwh = HourlySeries(hours, 0.0);
            rec.seen.assign(hours, false);
        } else if (rec.zip != cells[1]) {
            reader.fail("household " + cells[0] + " appears under two zips");
        }
        if (rec.seen[static_cast<std::size_t>(h)]) {
            reader.fail("duplicate hour " + cells[2] + " for household " + cells[0]);
        }
        rec.seen[static_cast<std::size_t>(h)] = true;
        rec.kwh.v[static_cast<std::size_t>(h)] = v;
        ++rec.count;
    }

    std::vector<LoadTrace> traces;
    IngestStats local;
    for (auto& [id, rec] : partial) {
        ++local.households_read;
        if (rec.count != hours) {
            throw DataError(path + ": household " + id + " has " + std::to_string(rec.count) +
                            " readings, expected " + std::to_string(hours));
        }
        const double mean_kw = rec.kwh.mean();
        const std::size_t zeros = static_cast<std::size_t>(
            std::count(rec.kwh.v.begin(), rec.kwh.v.end(), 0.0));
        if (mean_kw < 0.1) {
            ++local.dropped_low_mean;
            continue;
        }
        if (2 * zeros > hours) {
            ++local.dropped_zero_heavy;
            continue;
        }
        traces.push_back(LoadTrace{id, rec.zip, std::move(rec.kwh)});
    }
    if (stats) *stats = local;
    return traces;  // std::map iteration => sorted by household_id
}

std::map<std::string, HourlySeries> load_irradiance_csv(const std::string& path, const Calendar& cal) {
    auto out = load_series_csv(path, cal, "zip,hour_index,ghi_kwh_m2", false, 1.0);
    for (const auto& [zip, s] : out) {
        for (double v : s.v) {
            if (v < 0.0) throw DataError(path + ": negative irradiance for zip " + zip);
        }
    }
    return out;
}

std::map<std::string, HourlySeries> load_lmp_csv(const std::string& path, const Calendar& cal) {
    // $/MWh on disk, $/kWh in memory; negative LMPs are clamped to zero.
    return load_series_csv(path, cal, "node_id,hour_index,usd_per_mwh", true, 1e-3);
}

std::map<std::string, GeoPoint> load_geo_csv(const std::string& path, const std::string& id_column) {
    CsvReader reader(path);
    reader.expect_header(id_column + ",lat,lon");
    std::map<std::string, GeoPoint> out;
    std::vector<std::string> cells;
    while (reader.next(cells)) {
        if (cells.size() != 3) reader.fail("expected 3 columns");
        GeoPoint g{reader.parse_num(cells[1]), reader.parse_num(cells[2])};
        if (std::abs(g.lat) > 90.0 || std::abs(g.lon) > 180.0) {
            reader.fail("coordinates out of range");
        }
        if (!out.emplace(cells[0], g).second) reader.fail("duplicate id " + cells[0]);
    }
    if (out.empty()) throw DataError(path + ": no data rows");
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::string path, std::string header) : path_(std::move(path)) {
    buffer_ = header;
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path_);
    out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    out.close();
    if (!out) throw DataError("failed writing " + path_);
    closed_ = true;
}

void write_loads_csv(const std::string& path, const std::vector<LoadTrace>& traces) {
    CsvWriter w(path, "household_id,zip,hour_index,kwh");
    for (const LoadTrace& t : traces) {
        for (std::size_t h = 0; h < t.kwh.hours(); ++h) {
            w.row({t.household_id, t.zip, std::to_string(h), format_double(t.kwh.v[h])});
        }
    }
    w.close();
}

void write_irradiance_csv(const std::string& path, const std::map<std::string, HourlySeries>& by_zip) {
    CsvWriter w(path, "zip,hour_index,ghi_kwh_m2");
    for (const auto& [zip, s] : by_zip) {
        for (std::size_t h = 0; h < s.hours(); ++h) {
            w.row({zip, std::to_string(h), format_double(s.v[h])});
        }
    }
    w.close();
}

void write_lmp_csv(const std::string& path, const std::map<std::string, HourlySeries>& by_node_usd_kwh) {
    CsvWriter w(path, "node_id,hour_index,usd_per_mwh");
    for (const auto& [node, s] : by_node_usd_kwh) {
        for (std::size_t h = 0; h < s.hours(); ++h) {
            w.row({node, std::to_string(h), format_double(s.v[h] * 1000.0)});
        }
    }
    w.close();
}

void write_geo_csv(const std::string& path, const std::string& id_column,
                   const std::map<std::string, GeoPoint>& geo) {
    CsvWriter w(path, id_column + ",lat,lon");
    for (const auto& [id, g] : geo) {
        w.row({id, format_double(g.lat), format_double(g.lon)});
    }
    w.close();
}

std::uint64_t fnv1a_file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

}  // namespace derval
