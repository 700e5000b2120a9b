#include "agrowx/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

using namespace agrowx;
using namespace agrowx::stats;

namespace {

// Portable generator so the reference values can be reproduced outside C++:
// 64-bit LCG, 53-bit uniforms, sum of twelve uniforms minus six.
std::vector<double> lcg_normals(std::uint64_t seed, std::size_t n) {
    std::uint64_t x = seed;
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (int k = 0; k < 12; ++k) {
            x = 6364136223846793005ULL * x + 1442695040888963407ULL;
            s += static_cast<double>(x >> 11) * 0x1.0p-53;
        }
        out.push_back(s - 6.0);
    }
    return out;
}

std::vector<double> white_noise() { return lcg_normals(1, 500); }

std::vector<double> random_walk() {
    auto e = lcg_normals(2, 500);
    for (std::size_t i = 1; i < e.size(); ++i) e[i] += e[i - 1];
    return e;
}

std::vector<double> ar2() {
    const auto e = lcg_normals(3, 400);
    std::vector<double> y(400, 0.0);
    for (std::size_t t = 2; t < y.size(); ++t) y[t] = 0.5 * y[t - 1] + 0.3 * y[t - 2] + e[t];
    return y;
}

// Textbook OLS: normal equations solved by Gauss-Jordan elimination with
// partial pivoting; returns the t-ratio of the y_{t-1} coefficient.
double textbook_tau(const std::vector<double>& y, std::size_t lags) {
    const std::size_t k = 2 + lags;
    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> dys;
    for (std::size_t t = lags + 1; t < y.size(); ++t) {
        std::vector<double> row = {1.0, y[t - 1]};
        for (std::size_t j = 1; j <= lags; ++j) row.push_back(y[t - j] - y[t - j - 1]);
        rows.push_back(row);
        dys.push_back(y[t] - y[t - 1]);
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += rows[r][a] * dys[r];
            for (std::size_t b = 0; b < k; ++b) xtx[a][b] += rows[r][a] * rows[r][b];
        }
    // Augment with identity to get the inverse alongside the solution.
    std::vector<std::vector<double>> aug(k, std::vector<double>(2 * k + 1, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) aug[a][b] = xtx[a][b];
        aug[a][k + a] = 1.0;
        aug[a][2 * k] = xty[a];
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(aug[r][c]) > std::abs(aug[piv][c])) piv = r;
        std::swap(aug[c], aug[piv]);
        const double d = aug[c][c];
        for (auto& v : aug[c]) v /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double f = aug[r][c];
            for (std::size_t j = 0; j < 2 * k + 1; ++j) aug[r][j] -= f * aug[c][j];
        }
    }
    std::vector<double> beta(k);
    for (std::size_t a = 0; a < k; ++a) beta[a] = aug[a][2 * k];
    double ssr = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double fit = 0;
        for (std::size_t a = 0; a < k; ++a) fit += rows[r][a] * beta[a];
        ssr += (dys[r] - fit) * (dys[r] - fit);
    }
    const double s2 = ssr / static_cast<double>(rows.size() - k);
    return beta[1] / std::sqrt(s2 * aug[1][k + 1]);
}

}  // namespace

TEST(CriticalValues, LargeSampleConstantOnly) {
    const auto cv = critical_values(std::numeric_limits<double>::infinity());
    EXPECT_NEAR(cv.pct1, -3.43, 0.01);
    EXPECT_NEAR(cv.pct5, -2.86, 0.01);
    EXPECT_NEAR(cv.pct10, -2.57, 0.01);
    const auto big = critical_values(1e6);
    EXPECT_NEAR(big.pct5, -2.86, 0.01);
    EXPECT_NEAR(big.pct10, -2.57, 0.01);
}

TEST(CriticalValues, FiniteSampleMatchesReference) {
    // statsmodels adfuller at nobs = 499 (its own response-surface vintage)
    const auto cv = critical_values(499);
    EXPECT_NEAR(cv.pct1, -3.44352, 0.005);
    EXPECT_NEAR(cv.pct5, -2.86735, 0.005);
    EXPECT_NEAR(cv.pct10, -2.56986, 0.005);
}

TEST(AdfTest, WhiteNoiseIsStationary) {
    const auto y = white_noise();
    const auto r = adf_test(y);
    EXPECT_EQ(r.decision, Stationarity::Stationary);
    EXPECT_LT(r.statistic, -2.86);
    EXPECT_EQ(r.lags_used, 0u);
    EXPECT_EQ(r.nobs, 499u);
    EXPECT_NEAR(r.statistic, -22.44610347311473, 1e-8);  // statsmodels adfuller, autolag AIC
    EXPECT_NEAR(r.statistic, textbook_tau(y, r.lags_used), 1e-8);
    EXPECT_TRUE(r.p_value_clamped);
    EXPECT_LE(r.p_value, 0.001);
}

TEST(AdfTest, RandomWalkIsNonStationary) {
    const auto y = random_walk();
    const auto r = adf_test(y);
    EXPECT_EQ(r.decision, Stationarity::NonStationary);
    EXPECT_EQ(r.lags_used, 0u);
    EXPECT_NEAR(r.statistic, -1.7317412876714293, 1e-8);
    EXPECT_NEAR(r.statistic, textbook_tau(y, r.lags_used), 1e-8);
    EXPECT_NEAR(r.p_value, 0.4148, 0.03);  // table interpolation vs. response surface
    EXPECT_FALSE(r.p_value_clamped);
}

TEST(AdfTest, AutoregressionSelectsOneLag) {
    const auto y = ar2();
    const auto r = adf_test(y);
    EXPECT_EQ(r.lags_used, 1u);
    EXPECT_EQ(r.nobs, 398u);
    EXPECT_NEAR(r.statistic, -6.135130741323355, 1e-8);
    EXPECT_NEAR(r.statistic, textbook_tau(y, 1), 1e-8);
    EXPECT_EQ(r.decision, Stationarity::Stationary);
}

TEST(AdfTest, AffineInvariance) {
    for (const auto& y : {white_noise(), random_walk(), ar2()}) {
        std::vector<double> z;
        for (double v : y) z.push_back(3.7 * v - 120.0);
        EXPECT_NEAR(adf_test(z).statistic, adf_test(y).statistic, 1e-8);
    }
}

TEST(AdfTest, FixedMaxLagIsRespected) {
    EXPECT_EQ(adf_test(ar2(), 0).lags_used, 0u);
    EXPECT_NEAR(adf_test(ar2(), 0).statistic, textbook_tau(ar2(), 0), 1e-8);
}

TEST(AdfTest, Errors) {
    const std::vector<double> short_series(19, 1.0);
    try {
        adf_test(short_series);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooShort);
    }
    std::vector<double> flat(50, 2.0);
    try {
        adf_test(flat);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularRegression);
    }
    auto bad = white_noise();
    bad[10] = std::nan("");
    EXPECT_THROW(adf_test(bad), Error);
}

TEST(PValue, MonotoneInStatistic) {
    double prev = 0;
    for (double s = -8; s <= 3; s += 0.05) {
        const double p = tau_p_value(s).first;
        EXPECT_GE(p, prev);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
}

TEST(PValue, DecisionStableAwayFromBoundary) {
    // More than 0.2 beyond the 5% value the decision does not depend on the p-value table.
    const auto cv = critical_values(500);
    EXPECT_LT(tau_p_value(cv.pct5 - 0.21).first, 0.05);
    EXPECT_GT(tau_p_value(cv.pct5 + 0.21).first, 0.05);
}

TEST(SchwertLag, Formula) {
    EXPECT_EQ(schwert_max_lag(100), 12u);
    EXPECT_EQ(schwert_max_lag(500), 17u);  // floor(12 * 5^0.25) = floor(17.94)
}
