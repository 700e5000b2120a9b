#pragma once

// Advisory fixture scenarios shared by the unit tests and the acceptance run.

#include "agrowx/advisor.hpp"
#include "agrowx/text.hpp"

#include <string>
#include <vector>

namespace agrowx::testing {

inline advisor::KnowledgeBase shipped_knowledge_base() {
    const std::string dir = AGROWX_DATA;
    return {advisor::HazardRegistry::parse_csv(text::read_file(dir + "/hazards.csv")),
            advisor::ThresholdTable::parse_csv(text::read_file(dir + "/thresholds.csv")),
            advisor::CropTable::parse(text::read_file(dir + "/crops.txt"))};
}

/// Daily rows spreading each month's rainfall evenly, at a fixed temperature.
inline std::vector<advisor::DailyForecast> flat_months(int year, unsigned first_month, const std::vector<double>& rain,
                                                       const std::vector<double>& temperature) {
    std::vector<advisor::DailyForecast> out;
    for (std::size_t k = 0; k < rain.size(); ++k) {
        const unsigned m = first_month + static_cast<unsigned>(k);
        const unsigned len = days_in_month(year, m);
        for (unsigned d = 1; d <= len; ++d)
            out.push_back({make_date(year, m, d), rain[k] / len, 7.0, 80.0, temperature[k]});
    }
    return out;
}

struct AdvisorScenario {
    std::string name;
    std::string district;
    Date date;
    std::vector<advisor::DailyForecast> forecast;
};

/// Drought-prone district in Rabi; weather exactly at the monthly thresholds.
inline AdvisorScenario drought_district_rabi() {
    return {"drought-district-rabi", "Rajshahi", make_date(2024, 1, 10),
            flat_months(2024, 1, {10.1, 20.2}, {25.3, 28.1})};
}

/// July and August rain of 100 mm against thresholds of 474.4 and 384.7 mm.
inline AdvisorScenario monsoon_deficit() {
    return {"monsoon-deficit", "Dhaka", make_date(2024, 7, 1), flat_months(2024, 7, {100.0, 100.0}, {31.0, 31.0})};
}

/// No hazard and every month within its thresholds.
inline AdvisorScenario all_clear() {
    return {"all-clear", "Dhaka", make_date(2024, 4, 1),
            flat_months(2024, 4, {118.6, 227.8, 367.3}, {33.4, 33.0, 32.0})};
}

}  // namespace agrowx::testing
