#pragma once

#include "agrowx/error.hpp"
#include "agrowx/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace agrowx::geo {

inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
    double latitude = 0;
    double longitude = 0;

    GeoPoint() = default;
    GeoPoint(double lat, double lon) : latitude(lat), longitude(lon) {
        if (!(lat >= -90 && lat <= 90) || !(lon >= -180 && lon <= 180))
            fail(ErrorKind::Config, "coordinate out of range: " + text::format_double(lat) + ", " +
                                        text::format_double(lon));
    }
};

inline double radians(double deg) { return deg * std::numbers::pi / 180.0; }

/// Great-circle distance in km.
inline double haversine(const GeoPoint& a, const GeoPoint& b, double radius = kEarthRadiusKm) {
    const double p1 = radians(a.latitude), p2 = radians(b.latitude);
    const double dp = p2 - p1, dl = radians(b.longitude - a.longitude);
    const double h = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * radius * std::asin(std::sqrt(std::min(1.0, h)));
}

struct Station {
    std::string id;
    GeoPoint location;
};

struct NearestResult {
    std::string station;
    double distance_km = 0;
};

class StationRegistry {
public:
    StationRegistry() = default;

    void add(std::string id, GeoPoint p) {
        for (const auto& s : stations_)
            if (s.id == id) fail(ErrorKind::Config, "duplicate station '" + id + "' in registry");
        stations_.push_back({std::move(id), p});
    }

    [[nodiscard]] const std::vector<Station>& stations() const { return stations_; }
    [[nodiscard]] bool empty() const { return stations_.empty(); }
    [[nodiscard]] std::size_t size() const { return stations_.size(); }

    [[nodiscard]] const Station& at(std::string_view id) const {
        for (const auto& s : stations_)
            if (s.id == id) return s;
        fail(ErrorKind::UnknownStation, "station '" + std::string(id) + "' not in registry");
    }

    /// Closest station; equal distances go to the lexicographically smaller id.
    [[nodiscard]] NearestResult nearest(const GeoPoint& p) const {
        if (stations_.empty()) fail(ErrorKind::EmptyInput, "EmptyRegistry: no stations loaded");
        const Station* best = nullptr;
        double best_d = 0;
        for (const auto& s : stations_) {
            const double d = haversine(p, s.location);
            if (!best || d < best_d || (d == best_d && s.id < best->id)) {
                best = &s;
                best_d = d;
            }
        }
        return {best->id, best_d};
    }

    /// CSV with header `station,latitude,longitude`.
    static StationRegistry parse_csv(std::string_view content) {
        StationRegistry r;
        bool header = true;
        for (const auto& line : text::content_lines(content)) {
            const auto f = text::split(line, ',');
            if (header) {
                header = false;
                if (f.size() == 3 && text::lower(text::trim(f[0])) == "station") continue;
            }
            if (f.size() != 3) fail(ErrorKind::Format, "station registry row needs 3 fields: " + line);
            r.add(std::string(text::trim(f[0])),
                  GeoPoint(text::require_double(text::trim(f[1]), "latitude"),
                           text::require_double(text::trim(f[2]), "longitude")));
        }
        return r;
    }

    static StationRegistry load(const std::string& path) { return parse_csv(text::read_file(path)); }

private:
    std::vector<Station> stations_;
};

inline NearestResult nearest_station(const GeoPoint& p, const StationRegistry& registry) { return registry.nearest(p); }

}  // namespace agrowx::geo
