#pragma once

#include "agrowx/error.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>

namespace agrowx::stats {

enum class Stationarity { Stationary, NonStationary };

inline const char* to_string(Stationarity s) {
    return s == Stationarity::Stationary ? "stationary" : "non-stationary";
}

struct CriticalValues {
    double pct1 = 0;
    double pct5 = 0;
    double pct10 = 0;
};

struct AdfResult {
    double statistic = 0;
    double p_value = 1;
    /// True when the statistic lies beyond the smallest tabulated quantile and
    /// p_value is the clamp value (reported as "< 0.001").
    bool p_value_clamped = false;
    std::size_t lags_used = 0;
    std::size_t nobs = 0;
    CriticalValues critical_values;
    Stationarity decision = Stationarity::NonStationary;
};

/// Constant-only Dickey-Fuller critical values, response surface
/// b0 + b1/T + b2/T^2 + b3/T^3 for one regressor.
inline CriticalValues critical_values(double nobs) {
    static constexpr double coef[3][4] = {{-3.43035, -6.5393, -16.786, -79.433},
                                          {-2.86154, -2.8903, -4.234, -40.040},
                                          {-2.56677, -1.5384, -2.809, 0.0}};
    const auto eval = [nobs](const double* b) {
        if (!std::isfinite(nobs)) return b[0];
        const double inv = 1.0 / nobs;
        return b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
    };
    return {eval(coef[0]), eval(coef[1]), eval(coef[2])};
}

/// Asymptotic quantiles of the constant-only tau statistic; the p-value is
/// interpolated linearly between neighbouring entries.
inline constexpr std::array<std::pair<double, double>, 19> kTauQuantiles = {{
    {-4.0916, 0.001}, {-3.6424, 0.005}, {-3.4293, 0.01}, {-3.1215, 0.025}, {-2.8616, 0.05},
    {-2.5671, 0.10},  {-2.2174, 0.20},  {-1.9697, 0.30}, {-1.7610, 0.40},  {-1.5673, 0.50},
    {-1.3627, 0.60},  {-1.1372, 0.70},  {-0.8627, 0.80}, {-0.4578, 0.90},  {-0.0943, 0.95},
    {0.2514, 0.975},  {0.7082, 0.99},   {1.0753, 0.995}, {2.3788, 0.999},
}};

/// Returns (p, clamped_below).
inline std::pair<double, bool> tau_p_value(double statistic) {
    const auto& q = kTauQuantiles;
    if (statistic <= q.front().first) return {q.front().second, true};
    if (statistic >= q.back().first) return {q.back().second, false};
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (statistic <= q[i].first) {
            const double w = (statistic - q[i - 1].first) / (q[i].first - q[i - 1].first);
            return {q[i - 1].second + w * (q[i].second - q[i - 1].second), false};
        }
    }
    return {q.back().second, false};
}

inline std::size_t schwert_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

struct OlsFit {
    Eigen::VectorXd beta;
    double ssr = 0;
    double se_level = 0;  // standard error of the y_{t-1} coefficient
    std::size_t nobs = 0;
};

// Regression of dy_t on [1, y_{t-1}, dy_{t-1}, ..., dy_{t-lags}] for t in [first, n).
inline OlsFit df_regression(std::span<const double> y, std::size_t lags, std::size_t first) {
    const std::size_t n = y.size();
    const auto rows = static_cast<Eigen::Index>(n - first);
    const auto cols = static_cast<Eigen::Index>(2 + lags);
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd dy(rows);
    for (std::size_t t = first; t < n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - first);
        dy(r) = y[t] - y[t - 1];
        x(r, 0) = 1.0;
        x(r, 1) = y[t - 1];
        for (std::size_t j = 1; j <= lags; ++j) x(r, static_cast<Eigen::Index>(1 + j)) = y[t - j] - y[t - j - 1];
    }
    if (rows <= cols) fail(ErrorKind::TooShort, "not enough observations for the lag order");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < cols) fail(ErrorKind::SingularRegression, "collinear Dickey-Fuller design");

    OlsFit fit;
    fit.beta = qr.solve(dy);
    fit.ssr = (dy - x * fit.beta).squaredNorm();
    fit.nobs = static_cast<std::size_t>(rows);
    const double s2 = fit.ssr / static_cast<double>(rows - cols);
    // (X'X)^-1 = P R^-1 R^-T P^T; only the level coefficient's diagonal entry is needed.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(cols, cols));
    const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
    Eigen::Index level = 0;
    for (Eigen::Index k = 0; k < cols; ++k)
        if (qr.colsPermutation().indices()(k) == 1) level = k;
    fit.se_level = std::sqrt(s2 * cov_perm(level, level));
    return fit;
}

}  // namespace detail

inline constexpr std::size_t kMinAdfLength = 20;

/// Augmented Dickey-Fuller test with a constant and no trend. The lag order is
/// chosen by AIC over 0..max_lag on a common sample and then re-estimated on all
/// usable observations. Stationary iff statistic < 5% critical value and p < 0.05.
inline AdfResult adf_test(std::span<const double> y, std::optional<std::size_t> max_lag = std::nullopt) {
    const std::size_t n = y.size();
    if (n < kMinAdfLength)
        fail(ErrorKind::TooShort, "ADF needs at least " + std::to_string(kMinAdfLength) + " values");
    for (double v : y)
        if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "ADF input contains non-finite values");

    std::size_t maxlag = max_lag.value_or(schwert_max_lag(n));
    const std::size_t cap = (n - 1) / 2 > 2 ? (n - 1) / 2 - 2 : 0;
    maxlag = std::min(maxlag, cap);

    std::size_t best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= maxlag; ++k) {
        const auto fit = detail::df_regression(y, k, maxlag + 1);
        const double m = static_cast<double>(fit.nobs);
        const double aic = m * std::log(fit.ssr / m) + 2.0 * static_cast<double>(k + 2);
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = k;
        }
    }

    const auto fit = detail::df_regression(y, best_lag, best_lag + 1);
    AdfResult r;
    r.lags_used = best_lag;
    r.nobs = fit.nobs;
    if (!(fit.se_level > 0)) fail(ErrorKind::SingularRegression, "zero residual variance");
    r.statistic = fit.beta(1) / fit.se_level;
    r.critical_values = critical_values(static_cast<double>(fit.nobs));
    std::tie(r.p_value, r.p_value_clamped) = tau_p_value(r.statistic);
    r.decision = (r.statistic < r.critical_values.pct5 && r.p_value < 0.05) ? Stationarity::Stationary
                                                                             : Stationarity::NonStationary;
    return r;
}

}  // namespace agrowx::stats
