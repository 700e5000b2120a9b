#pragma once

#include "agrowx/calendar.hpp"
#include "agrowx/error.hpp"
#include "agrowx/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace agrowx::advisor {

// ---------------------------------------------------------------------------
// Seasons

enum class Season { Rabi, Kharif1, Kharif2 };

inline std::string_view to_string(Season s) {
    switch (s) {
        case Season::Rabi: return "rabi";
        case Season::Kharif1: return "kharif1";
        case Season::Kharif2: return "kharif2";
    }
    return "?";
}

inline std::string_view display_name(Season s) {
    switch (s) {
        case Season::Rabi: return "Rabi";
        case Season::Kharif1: return "Kharif-1";
        case Season::Kharif2: return "Kharif-2";
    }
    return "?";
}

inline Season parse_season(std::string_view s) {
    const auto k = text::lower(text::trim(s));
    if (k == "rabi") return Season::Rabi;
    if (k == "kharif1" || k == "kharif-1") return Season::Kharif1;
    if (k == "kharif2" || k == "kharif-2") return Season::Kharif2;
    fail(ErrorKind::Format, "unknown season '" + std::string(s) + "'");
}

/// Rabi Nov 16 - Mar 15, Kharif-1 Mar 16 - Jul 15, Kharif-2 Jul 16 - Nov 15.
inline Season current_season(const Date& d) {
    const int md = static_cast<int>(month_of(d)) * 100 + static_cast<int>(day_of(d));
    if (md >= 316 && md <= 715) return Season::Kharif1;
    if (md >= 716 && md <= 1115) return Season::Kharif2;
    return Season::Rabi;
}

// ---------------------------------------------------------------------------
// Forecast aggregation

struct DailyForecast {
    Date date;
    double rainfall = 0;     // mm
    double sunshine = 0;     // h
    double humidity = 0;     // %
    double temperature = 0;  // deg C
};

enum class Granularity { Daily, Weekly, Monthly, Seasonal, Yearly };

inline Granularity parse_granularity(std::string_view s) {
    const auto k = text::lower(text::trim(s));
    if (k == "daily") return Granularity::Daily;
    if (k == "weekly") return Granularity::Weekly;
    if (k == "monthly") return Granularity::Monthly;
    if (k == "seasonal") return Granularity::Seasonal;
    if (k == "yearly") return Granularity::Yearly;
    fail(ErrorKind::Config, "unknown granularity '" + std::string(s) + "'");
}

inline std::string_view to_string(Granularity g) {
    static constexpr std::array<std::string_view, 5> names = {"daily", "weekly", "monthly", "seasonal", "yearly"};
    return names[static_cast<std::size_t>(g)];
}

struct SummaryRow {
    std::string label;
    Date start;
    Date end;
    int days = 0;
    /// The period extends beyond the forecast on at least one side.
    bool partial = false;
    double rainfall_total = 0;
    double sunshine_mean = 0;
    double humidity_mean = 0;
    double temperature_mean = 0;
};

namespace detail {

struct Period {
    std::string label;
    Date start, end;  // full calendar extent
};

inline Period season_period(const Date& d) {
    const auto y = year_of(d);
    const int m = static_cast<int>(month_of(d));
    switch (current_season(d)) {
        case Season::Kharif1:
            return {std::to_string(y) + "-kharif1", make_date(y, 3, 16), make_date(y, 7, 15)};
        case Season::Kharif2:
            return {std::to_string(y) + "-kharif2", make_date(y, 7, 16), make_date(y, 11, 15)};
        case Season::Rabi: {
            const int start_year = m >= 11 ? y : y - 1;
            return {std::to_string(start_year) + "-rabi", make_date(start_year, 11, 16), make_date(start_year + 1, 3, 15)};
        }
    }
    return {};
}

inline Period period_of(const Date& d, Granularity g, const Date& origin) {
    const int y = year_of(d);
    const auto m = month_of(d);
    switch (g) {
        case Granularity::Daily: return {to_iso(d), d, d};
        case Granularity::Weekly: {
            const auto k = days_between(origin, d) / 7;
            const Date s = add_days(origin, k * 7);
            return {"week-" + std::to_string(k + 1), s, add_days(s, 6)};
        }
        case Granularity::Monthly: {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02u", y, m);
            return {buf, make_date(y, m, 1), make_date(y, m, days_in_month(y, m))};
        }
        case Granularity::Seasonal: return season_period(d);
        case Granularity::Yearly: return {std::to_string(y), make_date(y, 1, 1), make_date(y, 12, 31)};
    }
    return {};
}

}  // namespace detail

/// Rainfall summed, other variables averaged, per period. Days must be consecutive.
inline std::vector<SummaryRow> aggregate_forecast(const std::vector<DailyForecast>& days, Granularity g) {
    if (days.empty()) fail(ErrorKind::EmptyInput, "EmptyForecast: no forecast days");
    for (std::size_t i = 1; i < days.size(); ++i)
        if (days_between(days[i - 1].date, days[i].date) != 1)
            fail(ErrorKind::Calendar, "forecast days are not consecutive at " + to_iso(days[i].date));
    std::vector<SummaryRow> rows;
    std::optional<detail::Period> cur;
    const auto close = [&] {
        auto& r = rows.back();
        r.sunshine_mean /= r.days;
        r.humidity_mean /= r.days;
        r.temperature_mean /= r.days;
        r.partial = r.start != cur->start || r.end != cur->end;
    };
    for (const auto& d : days) {
        auto p = detail::period_of(d.date, g, days.front().date);
        if (!cur || p.label != cur->label) {
            if (cur) close();
            cur = p;
            rows.push_back({p.label, d.date, d.date});
        }
        auto& r = rows.back();
        r.end = d.date;
        ++r.days;
        r.rainfall_total += d.rainfall;
        r.sunshine_mean += d.sunshine;
        r.humidity_mean += d.humidity;
        r.temperature_mean += d.temperature;
    }
    close();
    return rows;
}

// ---------------------------------------------------------------------------
// Knowledge base

enum class DroughtSeverity { None, Moderate, Severe, VerySevere };

inline std::string_view to_string(DroughtSeverity s) {
    static constexpr std::array<std::string_view, 4> names = {"none", "moderate", "severe", "very_severe"};
    return names[static_cast<std::size_t>(s)];
}

inline DroughtSeverity parse_severity(std::string_view s) {
    auto k = text::lower(text::trim(s));
    std::replace(k.begin(), k.end(), '-', '_');
    std::erase(k, ' ');
    if (k == "none" || k.empty()) return DroughtSeverity::None;
    if (k == "moderate") return DroughtSeverity::Moderate;
    if (k == "severe") return DroughtSeverity::Severe;
    if (k == "very_severe" || k == "verysevere") return DroughtSeverity::VerySevere;
    fail(ErrorKind::Format, "unknown drought severity '" + std::string(s) + "'");
}

inline bool parse_bool(std::string_view s) {
    const auto k = text::lower(text::trim(s));
    if (k == "true" || k == "yes" || k == "1") return true;
    if (k == "false" || k == "no" || k == "0" || k.empty()) return false;
    fail(ErrorKind::Format, "not a boolean: '" + std::string(s) + "'");
}

struct HazardZone {
    std::string district;
    DroughtSeverity drought = DroughtSeverity::None;
    bool flood_prone = false;
    /// District absent from the registry; the all-clear values are defaults.
    bool unknown = false;

    [[nodiscard]] bool drought_prone() const { return drought != DroughtSeverity::None; }
};

class HazardRegistry {
public:
    void add(HazardZone z) {
        const auto key = text::lower(text::trim(z.district));
        if (zones_.contains(key)) fail(ErrorKind::Format, "duplicate district '" + z.district + "'");
        zones_.emplace(key, std::move(z));
    }

    [[nodiscard]] HazardZone lookup(std::string_view district) const {
        const auto it = zones_.find(text::lower(text::trim(district)));
        if (it != zones_.end()) return it->second;
        return {std::string(district), DroughtSeverity::None, false, true};
    }

    [[nodiscard]] std::size_t size() const { return zones_.size(); }

    /// CSV `district,drought_severity,flood_prone`.
    static HazardRegistry parse_csv(std::string_view content) {
        HazardRegistry r;
        bool header = true;
        for (const auto& line : text::content_lines(content)) {
            const auto f = text::split(line, ',');
            if (header) {
                header = false;
                if (!f.empty() && text::lower(text::trim(f[0])) == "district") continue;
            }
            if (f.size() != 3) fail(ErrorKind::Format, "hazard row needs 3 fields: " + line);
            r.add({std::string(text::trim(f[0])), parse_severity(f[1]), parse_bool(f[2]), false});
        }
        return r;
    }

private:
    std::map<std::string, HazardZone> zones_;
};

inline HazardZone hazard_lookup(std::string_view district, const HazardRegistry& registry) {
    return registry.lookup(district);
}

struct ClimateThreshold {
    double max_temperature_c = 0;
    double rainfall_mm = 0;
};

class ThresholdTable {
public:
    ThresholdTable() = default;
    explicit ThresholdTable(std::array<ClimateThreshold, 12> months) : months_(months) { validate(); }

    [[nodiscard]] const ClimateThreshold& month(unsigned m) const {
        if (m < 1 || m > 12) fail(ErrorKind::Calendar, "month out of range");
        return months_[m - 1];
    }

    /// CSV `month,max_temp_c,rainfall_mm` with exactly the 12 months.
    static ThresholdTable parse_csv(std::string_view content) {
        std::array<ClimateThreshold, 12> months{};
        std::array<bool, 12> seen{};
        bool header = true;
        for (const auto& line : text::content_lines(content)) {
            const auto f = text::split(line, ',');
            if (header) {
                header = false;
                if (!f.empty() && text::lower(text::trim(f[0])) == "month") continue;
            }
            if (f.size() != 3) fail(ErrorKind::Format, "threshold row needs 3 fields: " + line);
            const double m = text::require_double(f[0], "month");
            if (m != std::floor(m) || m < 1 || m > 12) fail(ErrorKind::Format, "bad month in threshold row: " + line);
            const auto i = static_cast<std::size_t>(m) - 1;
            if (seen[i]) fail(ErrorKind::Format, "duplicate month in threshold table: " + line);
            seen[i] = true;
            months[i] = {text::require_double(f[1], "max_temp_c"), text::require_double(f[2], "rainfall_mm")};
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            fail(ErrorKind::Format, "threshold table must list all 12 months");
        return ThresholdTable(months);
    }

private:
    void validate() const {
        for (const auto& t : months_)
            if (!(t.max_temperature_c > 0) || !(t.rainfall_mm > 0))
                fail(ErrorKind::Format, "threshold values must be positive");
    }

    std::array<ClimateThreshold, 12> months_{};
};

enum class Tolerance { Drought, Flood };

inline std::string_view to_string(Tolerance t) { return t == Tolerance::Drought ? "drought" : "flood"; }

/// Season -> tolerance class -> crops. Text form:
///
///     [rabi]
///     drought = T. aman rice, Mustard, Wheat
///     flood = Potato, Maize
class CropTable {
public:
    void set(Season s, Tolerance t, std::vector<std::string> crops) { table_[{s, t}] = std::move(crops); }

    [[nodiscard]] const std::vector<std::string>& crops(Season s, Tolerance t) const {
        static const std::vector<std::string> none;
        const auto it = table_.find({s, t});
        return it == table_.end() ? none : it->second;
    }

    static CropTable parse(std::string_view content) {
        CropTable c;
        std::optional<Season> section;
        for (const auto& raw : text::content_lines(content)) {
            const auto line = text::trim(raw);
            if (line.front() == '[') {
                if (line.back() != ']') fail(ErrorKind::Format, "bad section header: " + raw);
                section = parse_season(line.substr(1, line.size() - 2));
                continue;
            }
            if (!section) fail(ErrorKind::Format, "crop entry outside a season section: " + raw);
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail(ErrorKind::Format, "expected 'class = crops': " + raw);
            const auto cls = text::lower(text::trim(line.substr(0, eq)));
            Tolerance t;
            if (cls == "drought") t = Tolerance::Drought;
            else if (cls == "flood") t = Tolerance::Flood;
            else fail(ErrorKind::Format, "unknown tolerance class '" + cls + "'");
            std::vector<std::string> crops;
            for (const auto& item : text::split(line.substr(eq + 1), ','))
                if (!text::trim(item).empty()) crops.emplace_back(text::trim(item));
            c.set(*section, t, std::move(crops));
        }
        return c;
    }

private:
    std::map<std::pair<Season, Tolerance>, std::vector<std::string>> table_;
};

struct KnowledgeBase {
    HazardRegistry hazards;
    ThresholdTable thresholds;
    CropTable crops;
};

// ---------------------------------------------------------------------------
// Recommendation

struct RuleConfig {
    double temperature_margin_c = 2.0;  // added to the monthly max temperature
    double rainfall_low = 0.5;          // fraction of normal rainfall
    double rainfall_high = 1.5;
    int consecutive_months = 2;
};

struct MonthlyOutlook {
    int year = 0;
    unsigned month = 0;
    double rainfall_total = 0;
    double temperature_mean = 0;
};

struct Advisory {
    std::string location;
    Date date;
    Season season = Season::Rabi;
    HazardZone hazard;
    std::vector<std::string> warnings;
    std::vector<std::string> crops;
    std::vector<MonthlyOutlook> outlook;
};

/// Complete calendar months of the forecast.
inline std::vector<MonthlyOutlook> monthly_outlook(const std::vector<DailyForecast>& days) {
    std::vector<MonthlyOutlook> out;
    for (const auto& r : aggregate_forecast(days, Granularity::Monthly)) {
        if (r.partial) continue;
        out.push_back({year_of(r.start), static_cast<unsigned>(month_of(r.start)), r.rainfall_total, r.temperature_mean});
    }
    return out;
}

namespace detail {

// First run of >= `need` consecutive qualifying months, as [first, last] indices.
inline std::optional<std::pair<std::size_t, std::size_t>> find_run(const std::vector<bool>& hit, int need) {
    std::size_t start = 0;
    int len = 0;
    for (std::size_t i = 0; i < hit.size(); ++i) {
        if (hit[i]) {
            if (len == 0) start = i;
            if (++len >= need) {
                std::size_t end = i;
                while (end + 1 < hit.size() && hit[end + 1]) ++end;
                return std::pair{start, end};
            }
        } else {
            len = 0;
        }
    }
    return std::nullopt;
}

inline std::string month_span(const std::vector<MonthlyOutlook>& m, std::size_t a, std::size_t b) {
    static constexpr std::array<const char*, 12> abbr = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                         "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    return std::string(abbr[m[a].month - 1]) + " " + std::to_string(m[a].year) + " to " + abbr[m[b].month - 1] + " " +
           std::to_string(m[b].year);
}

inline void add_crops(std::vector<std::string>& out, const std::vector<std::string>& crops) {
    for (const auto& c : crops)
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
}

}  // namespace detail

/// Applies the hazard and threshold rules; every rule that fires contributes
/// its warning and crops. `outlook` must hold at least one complete month.
inline Advisory recommend(std::string_view district, const std::vector<MonthlyOutlook>& outlook, const Date& date,
                          const KnowledgeBase& kb, const RuleConfig& rules = {}) {
    if (outlook.empty()) fail(ErrorKind::InsufficientForecast, "forecast does not cover a full month");
    Advisory a;
    a.location = std::string(district);
    a.date = date;
    a.season = current_season(date);
    a.hazard = kb.hazards.lookup(district);
    a.outlook = outlook;
    const auto& drought_crops = kb.crops.crops(a.season, Tolerance::Drought);
    const auto& flood_crops = kb.crops.crops(a.season, Tolerance::Flood);

    if (a.hazard.drought_prone()) detail::add_crops(a.crops, drought_crops);
    if (a.hazard.flood_prone) detail::add_crops(a.crops, flood_crops);

    std::vector<bool> dry, wet;
    for (const auto& m : outlook) {
        const auto& t = kb.thresholds.month(m.month);
        dry.push_back(m.temperature_mean > t.max_temperature_c + rules.temperature_margin_c ||
                      m.rainfall_total < rules.rainfall_low * t.rainfall_mm);
        wet.push_back(m.rainfall_total > rules.rainfall_high * t.rainfall_mm);
    }
    if (const auto run = detail::find_run(dry, rules.consecutive_months)) {
        a.warnings.push_back("drought warning: heat or rainfall deficit from " +
                             detail::month_span(outlook, run->first, run->second));
        detail::add_crops(a.crops, drought_crops);
    }
    if (const auto run = detail::find_run(wet, rules.consecutive_months)) {
        a.warnings.push_back("heavy-rain warning: excess rainfall from " +
                             detail::month_span(outlook, run->first, run->second));
        detail::add_crops(a.crops, flood_crops);
    }
    return a;
}

inline Advisory recommend(std::string_view district, const std::vector<DailyForecast>& forecast, const Date& date,
                          const KnowledgeBase& kb, const RuleConfig& rules = {}) {
    if (forecast.empty()) fail(ErrorKind::InsufficientForecast, "empty forecast");
    return recommend(district, monthly_outlook(forecast), date, kb, rules);
}

// ---------------------------------------------------------------------------
// Rendering

inline nlohmann::json to_json(const SummaryRow& r) {
    return {{"period", r.label},          {"start", to_iso(r.start)},         {"end", to_iso(r.end)},
            {"days", r.days},             {"partial", r.partial},             {"rainfall_mm", r.rainfall_total},
            {"sunshine_h", r.sunshine_mean}, {"humidity_pct", r.humidity_mean}, {"temperature_c", r.temperature_mean}};
}

inline nlohmann::json to_json(const Advisory& a) {
    nlohmann::json outlook = nlohmann::json::array();
    for (const auto& m : a.outlook) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u", m.year, m.month);
        outlook.push_back({{"month", buf}, {"rainfall_mm", m.rainfall_total}, {"temperature_c", m.temperature_mean}});
    }
    return {{"location", a.location},
            {"date", to_iso(a.date)},
            {"season", to_string(a.season)},
            {"hazard",
             {{"drought_severity", to_string(a.hazard.drought)},
              {"flood_prone", a.hazard.flood_prone},
              {"unknown_district", a.hazard.unknown}}},
            {"warnings", a.warnings},
            {"crops", a.crops},
            {"outlook", outlook}};
}

inline std::string render_text(const Advisory& a) {
    std::ostringstream os;
    os << "Location: " << a.location << (a.hazard.unknown ? " (not in hazard registry)" : "") << '\n';
    os << "Date: " << to_iso(a.date) << "  Season: " << display_name(a.season) << '\n';
    os << "Drought severity: " << to_string(a.hazard.drought) << "  Flood-prone: " << (a.hazard.flood_prone ? "yes" : "no")
       << '\n';
    if (a.warnings.empty()) os << "No weather warnings.\n";
    for (const auto& w : a.warnings) os << "Warning: " << w << '\n';
    if (a.crops.empty()) {
        os << "No crop changes suggested.\n";
    } else {
        os << "Suggested crops:";
        for (std::size_t i = 0; i < a.crops.size(); ++i) os << (i ? ", " : " ") << a.crops[i];
        os << '\n';
    }
    return os.str();
}

}  // namespace agrowx::advisor
