#pragma once

#include "agrowx/calendar.hpp"
#include "agrowx/error.hpp"
#include "agrowx/text.hpp"
#include "agrowx/wind.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <string_view>
#include <utility>
#include <vector>

namespace agrowx {

/// Columns of the canonical daily table, in file order.
enum class Feature { Rainfall = 0, Sunshine, Humidity, Temperature, Wx, Wy };
inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "rainfall", "sunshine", "humidity", "temperature", "wx", "wy"};

inline std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

inline Feature parse_feature(std::string_view name) {
    const auto key = text::lower(text::trim(name));
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (kFeatureNames[i] == key) return static_cast<Feature>(i);
    fail(ErrorKind::Config, "unknown feature '" + std::string(name) + "'");
}

/// Quantity held by one raw monthly-matrix file.
enum class Variable { Rainfall, Sunshine, Humidity, Temperature, WindSpeed, WindDirection };
inline constexpr std::array<std::string_view, 6> kVariableNames = {
    "rainfall", "sunshine", "humidity", "temperature", "wind_speed", "wind_direction"};

inline std::string_view variable_name(Variable v) { return kVariableNames[static_cast<std::size_t>(v)]; }

inline std::optional<Variable> parse_variable(std::string_view name) {
    const auto key = text::lower(text::trim(name));
    for (std::size_t i = 0; i < kVariableNames.size(); ++i)
        if (kVariableNames[i] == key) return static_cast<Variable>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Station names

/// Maps raw station spellings to canonical ids. Lookup keys are trimmed,
/// case-folded and whitespace-collapsed; unknown names pass through as that key.
class StationAliases {
public:
    StationAliases() = default;

    static std::string key(std::string_view raw) {
        std::string out;
        bool space = false;
        for (char c : text::trim(raw)) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                space = true;
                continue;
            }
            if (space && !out.empty()) out.push_back(' ');
            space = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        return out;
    }

    void add(std::string_view alias, std::string canonical) { table_[key(alias)] = std::move(canonical); }

    [[nodiscard]] std::string canonical(std::string_view raw) const {
        const auto k = key(raw);
        if (k.empty()) fail(ErrorKind::Format, "empty station name");
        const auto it = table_.find(k);
        return it == table_.end() ? k : it->second;
    }

    /// Additional `alias,canonical` rows.
    void load_csv(std::string_view content) {
        for (const auto& line : text::content_lines(content)) {
            const auto f = text::split(line, ',');
            if (f.size() != 2) fail(ErrorKind::Format, "alias row needs 2 fields: " + line);
            if (text::lower(text::trim(f[0])) == "alias") continue;
            add(f[0], std::string(text::trim(f[1])));
        }
    }

    /// The 35 station names plus spellings seen in the raw files.
    static StationAliases bangladesh() {
        StationAliases a;
        static constexpr std::string_view names[] = {
            "Dhaka", "Tangail", "Mymensingh", "Faridpur", "Madaripur", "Chittagong", "Ambagan(Ctg)",
            "Sandwip", "Sitakunda", "Rangamati", "Cox's Bazar", "Kutubdia", "Teknaf", "Hatiya",
            "Feni", "Maijdee Court", "Comilla", "Chandpur", "Sylhet", "Srimangal", "Rajshahi",
            "Ishurdi", "Bogra", "Rangpur", "Dinajpur", "Sayedpur", "Khulna", "Mongla", "Satkhira",
            "Jessore", "Chuadanga", "Barisal", "Bhola", "Patuakhali", "Khepupara"};
        for (auto n : names) a.add(n, std::string(n));
        a.add("M.court", "Maijdee Court");
        a.add("M. Court", "Maijdee Court");
        a.add("Maijdeecourt", "Maijdee Court");
        a.add("Ambagan (Ctg)", "Ambagan(Ctg)");
        a.add("Ambagan", "Ambagan(Ctg)");
        a.add("Ctg", "Chittagong");
        a.add("Chattogram", "Chittagong");
        a.add("Coxs Bazar", "Cox's Bazar");
        a.add("Cox'sbazar", "Cox's Bazar");
        a.add("Bogura", "Bogra");
        a.add("Jashore", "Jessore");
        a.add("Cumilla", "Comilla");
        a.add("Barishal", "Barisal");
        a.add("Syedpur", "Sayedpur");
        a.add("Saidpur", "Sayedpur");
        a.add("Sreemangal", "Srimangal");
        return a;
    }

private:
    std::map<std::string, std::string> table_;
};

// ---------------------------------------------------------------------------
// Raw monthly matrix

struct RawCell {
    enum class Kind { Value, Blank, Star };
    Kind kind = Kind::Blank;
    std::string text;

    [[nodiscard]] bool missing() const { return kind != Kind::Value; }
};

inline RawCell classify_cell(std::string_view raw) {
    const auto t = text::trim(raw);
    if (t.empty()) return {RawCell::Kind::Blank, {}};
    if (t == "*") return {RawCell::Kind::Star, "*"};
    return {RawCell::Kind::Value, std::string(t)};
}

/// One station-month: station, year, month, 31 day cells, monthly average.
struct RawMonthRow {
    std::string station;
    int year = 0;
    unsigned month = 0;
    std::array<RawCell, 31> days;
    std::optional<double> monthly_avg;
};

/// Reads delimiter-separated rows of `station, year, month, d1..d31[, avg]`.
/// A first row whose year column is not numeric is taken as a header.
inline std::vector<RawMonthRow> read_raw_rows(std::string_view content, char delim = ',') {
    std::vector<RawMonthRow> rows;
    const auto lines = text::content_lines(content);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto f = text::split(lines[ln], delim);
        const std::string where = "raw row " + std::to_string(ln + 1);
        if (ln == 0 && f.size() >= 2 && !text::parse_double(f[1])) continue;
        if (f.size() != 34 && f.size() != 35)
            fail(ErrorKind::Format, where + ": expected 35 fields, got " + std::to_string(f.size()));
        RawMonthRow row;
        row.station = std::string(text::trim(f[0]));
        const double year = text::require_double(f[1], where + " year");
        const double month = text::require_double(f[2], where + " month");
        if (year != std::floor(year) || year < 1948 || year > 9999)
            fail(ErrorKind::Format, where + ": bad year '" + f[1] + "'");
        if (month != std::floor(month) || month < 1 || month > 12)
            fail(ErrorKind::Format, where + ": bad month '" + f[2] + "'");
        row.year = static_cast<int>(year);
        row.month = static_cast<unsigned>(month);
        for (std::size_t d = 0; d < 31; ++d) row.days[d] = classify_cell(f[3 + d]);
        if (f.size() == 35) {
            const auto avg = classify_cell(f[34]);
            if (!avg.missing()) row.monthly_avg = text::parse_double(avg.text);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct DailyValue {
    std::string station;
    Date date;
    std::optional<double> value;
};

/// Expands station-month rows into one entry per calendar day. Blank and "*"
/// cells become missing; the monthly average is ignored. Wind-direction cells
/// hold compass strings or degrees and are converted to degrees.
inline std::vector<DailyValue> parse_monthly_matrix(const std::vector<RawMonthRow>& rows, Variable variable,
                                                    const StationAliases& aliases = StationAliases::bangladesh()) {
    std::vector<DailyValue> out;
    std::set<std::tuple<std::string, int, unsigned>> seen;
    for (const auto& row : rows) {
        const std::string station = aliases.canonical(row.station);
        const std::string where = station + " " + std::to_string(row.year) + "-" + std::to_string(row.month);
        if (!seen.emplace(station, row.year, row.month).second)
            fail(ErrorKind::DuplicateRow, "duplicate station-month " + where);
        const unsigned length = days_in_month(row.year, row.month);
        for (unsigned d = 1; d <= 31; ++d) {
            const RawCell& cell = row.days[d - 1];
            if (d > length) {
                if (!cell.missing() || cell.kind == RawCell::Kind::Star)
                    fail(ErrorKind::Calendar, where + ": value in day " + std::to_string(d) + " beyond month end");
                continue;
            }
            DailyValue v{station, make_date(row.year, row.month, d), std::nullopt};
            if (!cell.missing()) {
                if (variable == Variable::WindDirection)
                    v.value = direction_degrees(cell.text);
                else
                    v.value = text::require_double(cell.text, where + " day " + std::to_string(d));
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Daily table

struct DailyRecord {
    Date date;
    std::array<std::optional<double>, kFeatureCount> values;

    std::optional<double>& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
    const std::optional<double>& operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }

    bool operator==(const DailyRecord&) const = default;
};

/// Contiguous, date-ordered daily records of one station.
struct DailySeries {
    std::string station;
    std::vector<DailyRecord> records;
    std::vector<std::string> feature_names{kFeatureNames.begin(), kFeatureNames.end()};

    [[nodiscard]] std::size_t size() const { return records.size(); }

    [[nodiscard]] std::vector<std::optional<double>> column(Feature f) const {
        std::vector<std::optional<double>> out;
        out.reserve(records.size());
        for (const auto& r : records) out.push_back(r[f]);
        return out;
    }

    void set_column(Feature f, const std::vector<std::optional<double>>& values) {
        if (values.size() != records.size()) fail(ErrorKind::ShapeMismatch, "column length mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) records[i][f] = values[i];
    }

    bool operator==(const DailySeries&) const = default;
};

/// Checks the no-gap, strictly-increasing date invariant.
inline void validate_series(const DailySeries& s) {
    for (std::size_t i = 1; i < s.records.size(); ++i)
        if (days_between(s.records[i - 1].date, s.records[i].date) != 1)
            fail(ErrorKind::Calendar, s.station + ": records not contiguous at " + to_iso(s.records[i].date));
}

/// Joins per-variable daily tables into one series per station spanning the
/// union of their dates. Wind speed and direction combine into wx/wy; any day
/// lacking either stays missing. Stations must appear in every supplied table.
inline std::vector<DailySeries> merge_variable_files(const std::map<Variable, std::vector<DailyValue>>& tables) {
    if (tables.empty()) fail(ErrorKind::EmptyInput, "no variable tables to merge");

    std::map<Variable, std::set<std::string>> stations_by_var;
    std::set<std::string> all;
    for (const auto& [var, values] : tables) {
        auto& s = stations_by_var[var];
        for (const auto& v : values) {
            s.insert(v.station);
            all.insert(v.station);
        }
    }
    for (const auto& [var, s] : stations_by_var) {
        for (const auto& st : all)
            if (!s.contains(st))
                fail(ErrorKind::StationMismatch, "station '" + st + "' missing from " +
                                                     std::string(variable_name(var)) +
                                                     " file (unresolved spelling?)");
    }

    struct Day {
        std::array<std::optional<double>, kFeatureCount> values;
        std::optional<double> speed, direction;
    };
    std::map<std::string, std::map<long, Day>> by_station;
    for (const auto& [var, values] : tables) {
        for (const auto& v : values) {
            Day& d = by_station[v.station][to_days(v.date).time_since_epoch().count()];
            switch (var) {
                case Variable::Rainfall: d.values[0] = v.value; break;
                case Variable::Sunshine: d.values[1] = v.value; break;
                case Variable::Humidity: d.values[2] = v.value; break;
                case Variable::Temperature: d.values[3] = v.value; break;
                case Variable::WindSpeed: d.speed = v.value; break;
                case Variable::WindDirection: d.direction = v.value; break;
            }
        }
    }

    std::vector<DailySeries> out;
    for (auto& [station, days] : by_station) {
        DailySeries s;
        s.station = station;
        const long first = days.begin()->first;
        const long last = days.rbegin()->first;
        s.records.reserve(static_cast<std::size_t>(last - first + 1));
        for (long t = first; t <= last; ++t) {
            DailyRecord r;
            r.date = from_days(std::chrono::sys_days{std::chrono::days{t}});
            if (const auto it = days.find(t); it != days.end()) {
                r.values = it->second.values;
                if (it->second.speed && it->second.direction) {
                    const auto [wx, wy] = wind_to_vector(*it->second.speed, *it->second.direction);
                    r[Feature::Wx] = wx;
                    r[Feature::Wy] = wy;
                }
            }
            s.records.push_back(r);
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical CSV: station,date,rainfall,sunshine,humidity,temperature,wx,wy

inline constexpr std::string_view kDailyCsvHeader = "station,date,rainfall,sunshine,humidity,temperature,wx,wy";

inline std::string write_daily_csv(const std::vector<DailySeries>& all) {
    std::string out(kDailyCsvHeader);
    out.push_back('\n');
    for (const auto& s : all) {
        for (const auto& r : s.records) {
            out += s.station;
            out.push_back(',');
            out += to_iso(r.date);
            for (const auto& v : r.values) {
                out.push_back(',');
                if (v) out += text::format_double(*v);
            }
            out.push_back('\n');
        }
    }
    return out;
}

inline std::string write_daily_csv(const DailySeries& s) { return write_daily_csv(std::vector<DailySeries>{s}); }

/// Parses the canonical CSV. Rows of a station must be contiguous and in date order.
inline std::vector<DailySeries> read_daily_csv(std::string_view content) {
    const auto lines = text::content_lines(content);
    if (lines.empty() || text::trim(lines[0]) != kDailyCsvHeader)
        fail(ErrorKind::Format, "daily CSV must start with header '" + std::string(kDailyCsvHeader) + "'");
    std::vector<DailySeries> out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto f = text::split(lines[ln], ',');
        if (f.size() != 2 + kFeatureCount)
            fail(ErrorKind::Format, "daily CSV line " + std::to_string(ln + 1) + ": expected 8 fields");
        if (out.empty() || out.back().station != f[0]) {
            for (const auto& s : out)
                if (s.station == f[0]) fail(ErrorKind::Format, "station " + f[0] + " rows are not contiguous");
            DailySeries s;
            s.station = f[0];
            out.push_back(std::move(s));
        }
        DailyRecord r;
        r.date = parse_iso(text::trim(f[1]));
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            if (text::trim(f[2 + k]).empty()) continue;
            r.values[k] = text::require_double(f[2 + k], "daily CSV line " + std::to_string(ln + 1));
        }
        out.back().records.push_back(r);
    }
    for (const auto& s : out) validate_series(s);
    return out;
}

/// Reads `<variable>.csv` (or `.txt`) files from `dir` and merges them. Absent
/// variables are skipped; at least one file must exist.
inline std::vector<DailySeries> load_raw_directory(const std::string& dir,
                                                   const StationAliases& aliases = StationAliases::bangladesh()) {
    std::map<Variable, std::vector<DailyValue>> tables;
    for (std::size_t i = 0; i < kVariableNames.size(); ++i) {
        const auto var = static_cast<Variable>(i);
        for (const char* ext : {".csv", ".txt"}) {
            const auto path = std::filesystem::path(dir) / (std::string(kVariableNames[i]) + ext);
            if (!std::filesystem::exists(path)) continue;
            tables[var] = parse_monthly_matrix(read_raw_rows(text::read_file(path.string())), var, aliases);
            break;
        }
    }
    if (tables.empty()) fail(ErrorKind::MissingArtifact, "no raw variable files in " + dir);
    return merge_variable_files(tables);
}

}  // namespace agrowx
