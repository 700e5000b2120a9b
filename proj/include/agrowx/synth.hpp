#pragma once

#include "agrowx/calendar.hpp"
#include "agrowx/error.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/wind.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace agrowx::synth {

/// Station names used when the caller does not list any.
inline const std::vector<std::string>& default_stations() {
    static const std::vector<std::string> names = {"Dhaka",    "Mymensingh", "Rajshahi", "Sylhet", "Khulna",
                                                   "Barisal",  "Rangpur",    "Chittagong", "Comilla", "Bogra"};
    return names;
}

struct Options {
    std::uint64_t seed = 7;
    std::vector<std::string> stations;  // empty = first `station_count` defaults
    int station_count = 3;
    int years = 20;
    int start_year = 2000;
    /// Probability that a day cell is written as missing (blank or "*").
    double missing_rate = 0.002;
};

/// Per-station climate shape drawn once from the seed.
struct StationClimate {
    double phase = 0;      // radians
    double amplitude = 1;  // scales every seasonal swing
    double temperature_base = 26;
    double humidity_base = 78;
    double rain_scale = 1;
};

/// Lag-one autocorrelation of the daily anomalies.
struct Persistence {
    double rainfall = 0.75;
    double sunshine = 0.7;
    double humidity = 0.85;
    double temperature = 0.9;
    double wind = 0.6;
};

namespace detail {

/// Unit-variance AR(1) process.
struct Anomaly {
    double phi = 0;
    double state = 0;
    template <class Rng>
    double next(Rng& rng, std::normal_distribution<double>& gauss) {
        state = phi * state + std::sqrt(1.0 - phi * phi) * gauss(rng);
        return state;
    }
};

inline double season_wave(int day_of_year, double lag_days, const StationClimate& c) {
    return std::sin(2.0 * std::numbers::pi * (day_of_year - lag_days) / 365.25 + c.phase);
}

inline std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    std::string s(buf);
    if (s == "-0.0") s = "0.0";
    return s;
}

}  // namespace detail

inline std::vector<std::string> station_list(const Options& o) {
    if (!o.stations.empty()) return o.stations;
    const auto& d = default_stations();
    if (o.station_count < 1 || o.station_count > static_cast<int>(d.size()))
        fail(ErrorKind::Config, "station count must be in [1, " + std::to_string(d.size()) + "]");
    return {d.begin(), d.begin() + o.station_count};
}

/// Raw monthly-matrix files, one per variable, keyed by file stem
/// (rainfall, sunshine, humidity, temperature, wind_speed, wind_direction).
/// Every feature is an annual sinusoid plus an AR(1) Gaussian anomaly, so
/// wet or hot spells last several days; rainfall is an exponentiated,
/// zero-rectified wave so it is right-skewed with dry spells.
inline std::map<Variable, std::string> generate(const Options& o) {
    if (o.years < 1) fail(ErrorKind::Config, "years must be >= 1");
    if (o.start_year < 1948) fail(ErrorKind::Config, "start year must be >= 1948");
    const auto stations = station_list(o);
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::map<Variable, std::string> files;
    const std::string header = [] {
        std::string h = "station,year,month";
        for (int d = 1; d <= 31; ++d) h += ",d" + std::to_string(d);
        return h + ",avg\n";
    }();
    for (std::size_t v = 0; v < kVariableNames.size(); ++v) files[static_cast<Variable>(v)] = header;

    for (const auto& station : stations) {
        StationClimate c;
        c.phase = (unit(rng) - 0.5) * 0.8;
        c.amplitude = 0.8 + 0.4 * unit(rng);
        c.temperature_base = 24.5 + 3.0 * unit(rng);
        c.humidity_base = 72.0 + 10.0 * unit(rng);
        c.rain_scale = 0.7 + 0.6 * unit(rng);
        const Persistence ph;
        detail::Anomaly a_rain{ph.rainfall, gauss(rng)}, a_sun{ph.sunshine, gauss(rng)},
            a_hum{ph.humidity, gauss(rng)}, a_temp{ph.temperature, gauss(rng)}, a_wind{ph.wind, gauss(rng)};

        for (int y = o.start_year; y < o.start_year + o.years; ++y) {
            for (unsigned m = 1; m <= 12; ++m) {
                const unsigned len = days_in_month(y, m);
                std::map<Variable, std::vector<std::string>> cells;
                std::map<Variable, std::pair<double, int>> sums;
                for (unsigned d = 1; d <= len; ++d) {
                    const Date date = make_date(y, m, d);
                    const int doy = static_cast<int>(days_between(make_date(y, 1, 1), date)) + 1;
                    const double wave = detail::season_wave(doy, 110, c);
                    const double monsoon = detail::season_wave(doy, 150, c);

                    const double temperature = c.temperature_base + 5.0 * c.amplitude * wave + 1.2 * a_temp.next(rng, gauss);
                    const double humidity =
                        std::clamp(c.humidity_base + 11.0 * c.amplitude * monsoon + 4.0 * a_hum.next(rng, gauss), 20.0, 100.0);
                    const double sunshine = std::clamp(6.5 - 2.2 * c.amplitude * monsoon + 1.1 * a_sun.next(rng, gauss), 0.0, 13.0);
                    const double rainfall =
                        std::max(0.0, c.rain_scale * (std::exp(1.4 * c.amplitude * monsoon + 0.8 * a_rain.next(rng, gauss)) - 1.2) * 6.0);
                    const double speed = std::max(0.0, 6.0 + 3.0 * monsoon + 1.5 * a_wind.next(rng, gauss));
                    // Southerly monsoon flow in summer, northerly in winter.
                    double bearing = (monsoon > 0 ? 170.0 : 340.0) + 35.0 * gauss(rng);
                    bearing = std::fmod(std::fmod(bearing, 360.0) + 360.0, 360.0);
                    const auto compass = kCompassPoints[static_cast<std::size_t>(std::lround(bearing / 22.5)) % 16];

                    const std::array<std::pair<Variable, double>, 5> numeric = {{{Variable::Rainfall, rainfall},
                                                                                 {Variable::Sunshine, sunshine},
                                                                                 {Variable::Humidity, humidity},
                                                                                 {Variable::Temperature, temperature},
                                                                                 {Variable::WindSpeed, speed}}};
                    const double r = unit(rng);
                    const bool missing = r < o.missing_rate;
                    const char* marker = r < o.missing_rate / 2 ? "" : "*";
                    for (const auto& [var, value] : numeric) {
                        if (missing) {
                            cells[var].emplace_back(marker);
                            continue;
                        }
                        const auto text = detail::format_cell(value);
                        cells[var].push_back(text);
                        sums[var].first += std::stod(text);
                        ++sums[var].second;
                    }
                    cells[Variable::WindDirection].emplace_back(missing ? std::string(marker) : std::string(compass));
                }
                for (auto& [var, row] : cells) {
                    std::string line = station + "," + std::to_string(y) + "," + std::to_string(m);
                    for (unsigned d = 0; d < 31; ++d) line += "," + (d < len ? row[d] : std::string());
                    line += ",";
                    if (var != Variable::WindDirection && sums[var].second > 0)
                        line += detail::format_cell(sums[var].first / sums[var].second);
                    files[var] += line + "\n";
                }
            }
        }
    }
    return files;
}

}  // namespace agrowx::synth
