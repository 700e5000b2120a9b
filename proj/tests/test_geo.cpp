#include "agrowx/geo.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace agrowx;
using namespace agrowx::geo;

namespace {

const GeoPoint kUttara{23.8759, 90.3795};
const GeoPoint kDhaka{23.8111, 90.3965};
const GeoPoint kMymensingh{24.7471, 90.4203};

StationRegistry shipped() { return StationRegistry::load(std::string(AGROWX_DATA) + "/stations.csv"); }

}  // namespace

TEST(Haversine, SamePointIsZero) { EXPECT_EQ(haversine(kDhaka, kDhaka), 0.0); }

TEST(Haversine, UttaraDistances) {
    EXPECT_NEAR(haversine(kUttara, kDhaka), 7.6, 0.3);
    EXPECT_NEAR(haversine(kUttara, kMymensingh), 96.96, 1.0);
}

TEST(Haversine, QuarterMeridian) {
    // Equator to pole is a quarter of the great circle.
    EXPECT_NEAR(haversine({0, 0}, {90, 0}), kEarthRadiusKm * std::numbers::pi / 2, 1e-9);
    EXPECT_NEAR(haversine({0, -179.5}, {0, 179.5}), kEarthRadiusKm * radians(1.0), 1e-9);
}

TEST(Haversine, SymmetricAndTriangle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lat(-89, 89), lon(-179, 179);
    for (int i = 0; i < 500; ++i) {
        const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
        EXPECT_NEAR(haversine(a, b), haversine(b, a), 1e-9);
        EXPECT_GE(haversine(a, b), 0.0);
        EXPECT_LE(haversine(a, c), haversine(a, b) + haversine(b, c) + 1e-6);
    }
}

TEST(GeoPointTest, RangeChecked) {
    EXPECT_THROW((GeoPoint{91, 0}), Error);
    EXPECT_THROW((GeoPoint{0, -181}), Error);
}

TEST(Nearest, UttaraPicksDhaka) {
    StationRegistry r;
    r.add("Mymensingh", kMymensingh);
    r.add("Dhaka", kDhaka);
    const auto n = nearest_station(kUttara, r);
    EXPECT_EQ(n.station, "Dhaka");
    EXPECT_NEAR(n.distance_km, 7.6, 0.3);
    EXPECT_EQ(nearest_station(kUttara, shipped()).station, "Dhaka");
}

TEST(Nearest, ExactStationCoordinates) {
    const auto reg = shipped();
    for (const auto& s : reg.stations()) {
        const auto n = reg.nearest(s.location);
        EXPECT_EQ(n.station, s.id);
        EXPECT_EQ(n.distance_km, 0.0);
    }
}

TEST(Nearest, MatchesBruteForce) {
    const auto reg = shipped();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(20.5, 26.5), lon(88.0, 92.7);
    for (int i = 0; i < 3; ++i) {
        const GeoPoint p{lat(rng), lon(rng)};
        std::string best;
        double best_d = 1e300;
        for (const auto& s : reg.stations()) {
            const double d = haversine(p, s.location);
            if (d < best_d) {
                best_d = d;
                best = s.id;
            }
        }
        EXPECT_EQ(reg.nearest(p).station, best);
    }
}

TEST(Nearest, TieGoesToSmallerId) {
    StationRegistry r;
    r.add("Zeta", {0, 1});
    r.add("Alpha", {0, -1});
    EXPECT_EQ(r.nearest({0, 0}).station, "Alpha");
}

TEST(Registry, ErrorsAndParsing) {
    StationRegistry empty;
    try {
        (void)empty.nearest(kDhaka);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    EXPECT_EQ(shipped().size(), 35u);
    EXPECT_THROW(StationRegistry::parse_csv("station,latitude,longitude\nA,1,2\nA,3,4\n"), Error);
    EXPECT_THROW(StationRegistry::parse_csv("A,north,2\n"), Error);
    EXPECT_THROW((void)shipped().at("Atlantis"), Error);
}
