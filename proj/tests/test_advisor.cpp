#include "advisor_scenarios.hpp"

#include "agrowx/advisor.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace agrowx;
using namespace agrowx::advisor;
using agrowx::testing::flat_months;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

const KnowledgeBase& kb() {
    static const KnowledgeBase k = agrowx::testing::shipped_knowledge_base();
    return k;
}

}  // namespace

TEST(Season, ThreeSeasonPartition) {
    EXPECT_EQ(current_season(make_date(2023, 1, 1)), Season::Rabi);
    EXPECT_EQ(current_season(make_date(2023, 8, 1)), Season::Kharif2);
    EXPECT_EQ(current_season(make_date(2023, 3, 15)), Season::Rabi);
    EXPECT_EQ(current_season(make_date(2023, 3, 16)), Season::Kharif1);
    EXPECT_EQ(current_season(make_date(2023, 7, 15)), Season::Kharif1);
    EXPECT_EQ(current_season(make_date(2023, 7, 16)), Season::Kharif2);
    EXPECT_EQ(current_season(make_date(2023, 11, 15)), Season::Kharif2);
    EXPECT_EQ(current_season(make_date(2023, 11, 16)), Season::Rabi);
}

TEST(Season, EveryDayCountsOnce) {
    // Rabi: Nov 16-30 (15) + Dec (31) + Jan (31) + Feb + Mar 1-15 (15)
    for (int y : {2023, 2024}) {
        int counts[3] = {0, 0, 0};
        for (Date d = make_date(y, 1, 1); year_of(d) == y; d = add_days(d, 1)) ++counts[static_cast<int>(current_season(d))];
        const int feb = days_in_month(y, 2) == 29 ? 29 : 28;
        EXPECT_EQ(counts[0], 15 + 31 + 31 + feb + 15);
        EXPECT_EQ(counts[1], 16 + 30 + 31 + 30 + 15);  // Mar 16 - Jul 15
        EXPECT_EQ(counts[2], 16 + 31 + 30 + 31 + 15);  // Jul 16 - Nov 15
        EXPECT_EQ(counts[0] + counts[1] + counts[2], y == 2024 ? 366 : 365);
    }
    EXPECT_EQ(parse_season("Kharif1"), Season::Kharif1);
    EXPECT_THROW(parse_season("winter"), Error);
}

TEST(Aggregate, ConstantWeek) {
    std::vector<DailyForecast> days;
    for (int i = 0; i < 7; ++i) days.push_back({add_days(make_date(2024, 5, 6), i), 2.0, 8.0, 75.0, 30.0});
    const auto rows = aggregate_forecast(days, Granularity::Weekly);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].rainfall_total, 14.0);
    EXPECT_EQ(rows[0].temperature_mean, 30.0);
    EXPECT_EQ(rows[0].days, 7);
    EXPECT_FALSE(rows[0].partial);
}

TEST(Aggregate, SeasonalOverOneYear) {
    std::vector<DailyForecast> days;
    for (int i = 0; i < 365; ++i) days.push_back({add_days(make_date(2023, 1, 1), i), 1.0, 1.0, 1.0, 1.0});
    const auto rows = aggregate_forecast(days, Granularity::Seasonal);
    // Rabi (Jan 1 - Mar 15, partial), Kharif-1, Kharif-2, Rabi (Nov 16 - Dec 31, partial)
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].label, "2022-rabi");
    EXPECT_EQ(rows[0].days, 74);
    EXPECT_TRUE(rows[0].partial);
    EXPECT_EQ(rows[1].label, "2023-kharif1");
    EXPECT_EQ(rows[1].days, 122);
    EXPECT_FALSE(rows[1].partial);
    EXPECT_EQ(rows[2].days, 123);
    EXPECT_FALSE(rows[2].partial);
    EXPECT_EQ(rows[3].label, "2023-rabi");
    EXPECT_EQ(rows[3].days, 46);
    EXPECT_TRUE(rows[3].partial);
    int full = 0;
    for (const auto& r : rows) full += r.partial ? 0 : 1;
    EXPECT_EQ(full, 2);
}

TEST(Aggregate, YearlyAndDaily) {
    std::vector<DailyForecast> days;
    for (int i = 0; i < 365; ++i) days.push_back({add_days(make_date(2023, 1, 1), i), 0.5, 1.0, 1.0, 1.0});
    const auto y = aggregate_forecast(days, Granularity::Yearly);
    ASSERT_EQ(y.size(), 1u);
    EXPECT_FALSE(y[0].partial);
    EXPECT_EQ(aggregate_forecast(days, Granularity::Daily).size(), 365u);
    EXPECT_EQ(to_string(parse_granularity("monthly")), "monthly");
    EXPECT_THROW(parse_granularity("hourly"), Error);
}

TEST(Aggregate, MonthlyRainfallIsConserved) {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(0.2);
    std::vector<DailyForecast> days;
    double total = 0;
    for (int i = 0; i < 400; ++i) {
        days.push_back({add_days(make_date(2024, 2, 10), i), e(rng), 5, 70, 25});
        total += days.back().rainfall;
    }
    double sum = 0;
    for (const auto& r : aggregate_forecast(days, Granularity::Monthly)) sum += r.rainfall_total;
    EXPECT_NEAR(sum, total, 1e-9 * total);
}

TEST(Aggregate, Errors) {
    try {
        aggregate_forecast({}, Granularity::Monthly);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    std::vector<DailyForecast> gap = {{make_date(2024, 1, 1)}, {make_date(2024, 1, 3)}};
    EXPECT_THROW(aggregate_forecast(gap, Granularity::Daily), Error);
}

TEST(Hazards, LookupKnownAndUnknown) {
    const auto raj = kb().hazards.lookup("Rajshahi");
    EXPECT_EQ(raj.drought, DroughtSeverity::VerySevere);
    EXPECT_FALSE(raj.unknown);
    EXPECT_TRUE(kb().hazards.lookup("sunamganj").flood_prone);
    const auto none = hazard_lookup("Atlantis", kb().hazards);
    EXPECT_TRUE(none.unknown);
    EXPECT_FALSE(none.drought_prone());
    EXPECT_FALSE(none.flood_prone);
}

TEST(KnowledgeBaseFiles, ParseErrors) {
    EXPECT_THROW(ThresholdTable::parse_csv("month,max_temp_c,rainfall_mm\n1,25,10\n"), Error);
    EXPECT_THROW(HazardRegistry::parse_csv("district,drought_severity,flood_prone\nX,extreme,true\n"), Error);
    EXPECT_THROW(CropTable::parse("drought = Wheat\n"), Error);
    const auto c = CropTable::parse("[kharif2]\nflood = A, B,\n");
    EXPECT_EQ(c.crops(Season::Kharif2, Tolerance::Flood), (std::vector<std::string>{"A", "B"}));
    EXPECT_TRUE(c.crops(Season::Rabi, Tolerance::Flood).empty());
    EXPECT_EQ(kb().thresholds.month(7).rainfall_mm, 474.4);
}

TEST(Recommend, DroughtDistrictInRabi) {
    const auto s = agrowx::testing::drought_district_rabi();
    const auto a = recommend(s.district, s.forecast, s.date, kb());
    EXPECT_EQ(a.season, Season::Rabi);
    EXPECT_TRUE(a.warnings.empty());
    ASSERT_GE(a.crops.size(), 3u);
    EXPECT_EQ(a.crops[0], "T. aman rice");
    EXPECT_EQ(a.crops[1], "Mustard");
    EXPECT_EQ(a.crops[2], "Wheat");
}

TEST(Recommend, MonsoonDeficitFiresDroughtWarning) {
    const auto s = agrowx::testing::monsoon_deficit();
    const auto a = recommend(s.district, s.forecast, s.date, kb());
    ASSERT_EQ(a.warnings.size(), 1u);
    EXPECT_EQ(a.warnings[0], "drought warning: heat or rainfall deficit from Jul 2024 to Aug 2024");
    EXPECT_EQ(a.crops, kb().crops.crops(Season::Kharif1, Tolerance::Drought));
}

TEST(Recommend, AllClear) {
    const auto s = agrowx::testing::all_clear();
    const auto a = recommend(s.district, s.forecast, s.date, kb());
    EXPECT_TRUE(a.warnings.empty());
    EXPECT_TRUE(a.crops.empty());
    EXPECT_EQ(a.outlook.size(), 3u);
}

TEST(Recommend, SingleDryMonthIsNotEnough) {
    const auto days = flat_months(2024, 7, {100.0, 384.7}, {31.0, 31.0});
    EXPECT_TRUE(recommend("Dhaka", days, make_date(2024, 7, 1), kb()).warnings.empty());
}

TEST(Recommend, HeatAloneFiresDroughtRule) {
    const auto days = flat_months(2024, 4, {118.6, 227.8}, {35.5, 35.1});
    const auto a = recommend("Dhaka", days, make_date(2024, 4, 1), kb());
    ASSERT_EQ(a.warnings.size(), 1u);
    EXPECT_NE(a.warnings[0].find("drought"), std::string::npos);
}

TEST(Recommend, HeavyRainAndFloodDistrictAccumulateWithoutDuplicates) {
    const auto days = flat_months(2024, 7, {800.0, 700.0}, {31.0, 31.0});
    const auto a = recommend("Sirajganj", days, make_date(2024, 7, 20), kb());
    ASSERT_EQ(a.warnings.size(), 1u);
    EXPECT_NE(a.warnings[0].find("heavy-rain"), std::string::npos);
    const auto& drought = kb().crops.crops(Season::Kharif2, Tolerance::Drought);
    const auto& flood = kb().crops.crops(Season::Kharif2, Tolerance::Flood);
    for (const auto& c : drought) EXPECT_TRUE(contains(a.crops, c));
    for (const auto& c : flood) EXPECT_TRUE(contains(a.crops, c));
    std::set<std::string> unique(a.crops.begin(), a.crops.end());
    EXPECT_EQ(unique.size(), a.crops.size());
}

TEST(Recommend, MoreRainNeverNewlyFiresDrought) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 600);
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> rain = {u(rng), u(rng), u(rng)};
        const std::vector<double> temp = {31, 31, 31};
        auto wetter = rain;
        for (auto& r : wetter) r += u(rng) / 3;
        const auto base = recommend("Dhaka", flat_months(2024, 6, rain, temp), make_date(2024, 6, 1), kb());
        const auto more = recommend("Dhaka", flat_months(2024, 6, wetter, temp), make_date(2024, 6, 1), kb());
        const auto has = [](const Advisory& a, const char* w) {
            for (const auto& s : a.warnings)
                if (s.find(w) != std::string::npos) return true;
            return false;
        };
        if (!has(base, "drought")) {
            EXPECT_FALSE(has(more, "drought"));
        }
        if (!has(more, "heavy-rain")) {
            EXPECT_FALSE(has(base, "heavy-rain"));
        }
    }
}

TEST(Recommend, NeedsAFullMonth) {
    std::vector<DailyForecast> days;
    for (int i = 0; i < 20; ++i) days.push_back({add_days(make_date(2024, 7, 5), i), 1, 1, 1, 1});
    try {
        recommend("Dhaka", days, make_date(2024, 7, 5), kb());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientForecast);
    }
}

TEST(Recommend, DeterministicAndRendered) {
    const auto s = agrowx::testing::monsoon_deficit();
    const auto a = recommend(s.district, s.forecast, s.date, kb());
    const auto b = recommend(s.district, s.forecast, s.date, kb());
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    const auto j = to_json(a);
    EXPECT_EQ(j["season"], "kharif1");
    EXPECT_EQ(j["outlook"][0]["month"], "2024-07");
    const auto text = render_text(a);
    EXPECT_NE(text.find("Warning: drought warning"), std::string::npos);
    EXPECT_NE(text.find("Suggested crops: Jute"), std::string::npos);
}
