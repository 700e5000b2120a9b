#pragma once

#include "agrowx/error.hpp"
#include "agrowx/text.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

namespace agrowx {

/// 16-point compass rose, clockwise from north in 22.5 degree steps.
inline constexpr std::array<std::string_view, 16> kCompassPoints = {
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW", "NNW"};

/// Degrees clockwise from north for a compass string ("SSE") or a numeric
/// string in [0, 360).
inline double direction_degrees(std::string_view direction) {
    const auto t = text::trim(direction);
    if (const auto deg = text::parse_double(t)) {
        if (!(*deg >= 0.0 && *deg < 360.0))
            fail(ErrorKind::UnknownDirection, "direction " + std::string(t) + " outside [0, 360)");
        return *deg;
    }
    std::string up(t);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < kCompassPoints.size(); ++i)
        if (kCompassPoints[i] == up) return 22.5 * static_cast<double>(i);
    fail(ErrorKind::UnknownDirection, "unmapped compass direction '" + std::string(t) + "'");
}

/// Speed and bearing (clockwise from north) to east/north components:
/// wx = speed * sin(theta), wy = speed * cos(theta).
inline std::pair<double, double> wind_to_vector(double speed, double degrees) {
    if (!(speed >= 0.0)) fail(ErrorKind::Format, "wind speed must be non-negative");
    if (!(degrees >= 0.0 && degrees < 360.0))
        fail(ErrorKind::UnknownDirection, "direction outside [0, 360)");
    const double theta = degrees * std::numbers::pi / 180.0;
    return {speed * std::sin(theta), speed * std::cos(theta)};
}

inline std::pair<double, double> wind_to_vector(double speed, std::string_view direction) {
    return wind_to_vector(speed, direction_degrees(direction));
}

}  // namespace agrowx
