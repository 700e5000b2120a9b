#pragma once

#include "agrowx/error.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/normalization.hpp"
#include "agrowx/text.hpp"
#include "agrowx/wind.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agrowx {

// ---------------------------------------------------------------------------
// Imputation

enum class ImputationMethod { Mean, ForwardBackwardFill, LinearInterpolation, SeasonalInterpolation };

inline constexpr int kSeasonalPeriod = 365;

inline ImputationMethod parse_imputation(std::string_view key) {
    const auto k = text::lower(text::trim(key));
    if (k == "mean") return ImputationMethod::Mean;
    if (k == "ffill_bfill") return ImputationMethod::ForwardBackwardFill;
    if (k == "linear") return ImputationMethod::LinearInterpolation;
    if (k == "seasonal") return ImputationMethod::SeasonalInterpolation;
    fail(ErrorKind::Config, "impute must be mean|ffill_bfill|linear|seasonal, got '" + std::string(key) + "'");
}

inline std::string_view to_string(ImputationMethod m) {
    switch (m) {
        case ImputationMethod::Mean: return "mean";
        case ImputationMethod::ForwardBackwardFill: return "ffill_bfill";
        case ImputationMethod::LinearInterpolation: return "linear";
        case ImputationMethod::SeasonalInterpolation: return "seasonal";
    }
    return "linear";
}

namespace detail {

// Straight line through the observations bracketing each gap; edges copy the
// nearest observation.
inline void fill_linear(std::vector<double>& out, const std::vector<std::optional<double>>& v) {
    const std::size_t n = v.size();
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i]) continue;
        if (!prev) {
            for (std::size_t j = 0; j < i; ++j) out[j] = *v[i];
        } else if (i - *prev > 1) {
            const double x0 = static_cast<double>(*prev), y0 = *v[*prev];
            const double x2 = static_cast<double>(i), y2 = *v[i];
            for (std::size_t j = *prev + 1; j < i; ++j)
                out[j] = y0 + (y2 - y0) * (static_cast<double>(j) - x0) / (x2 - x0);
        }
        out[i] = *v[i];
        prev = i;
    }
    for (std::size_t j = *prev + 1; j < n; ++j) out[j] = *v[*prev];
}

}  // namespace detail

/// Fills every missing entry of one column.
inline std::vector<double> impute_values(const std::vector<std::optional<double>>& v, ImputationMethod method) {
    const std::size_t n = v.size();
    std::size_t observed = 0;
    double sum = 0;
    for (const auto& x : v)
        if (x) {
            ++observed;
            sum += *x;
        }
    if (observed == 0) fail(ErrorKind::AllMissing, "column has no observations");

    std::vector<double> out(n, 0.0);
    switch (method) {
        case ImputationMethod::Mean: {
            const double mean = sum / static_cast<double>(observed);
            for (std::size_t i = 0; i < n; ++i) out[i] = v[i] ? *v[i] : mean;
            break;
        }
        case ImputationMethod::ForwardBackwardFill: {
            std::optional<double> last;
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i]) last = v[i];
                if (last) out[i] = *last;
            }
            std::size_t first = 0;
            while (!v[first]) ++first;
            for (std::size_t i = 0; i < first; ++i) out[i] = *v[first];
            break;
        }
        case ImputationMethod::LinearInterpolation: detail::fill_linear(out, v); break;
        case ImputationMethod::SeasonalInterpolation: {
            detail::fill_linear(out, v);
            const std::size_t p = kSeasonalPeriod;
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i]) continue;
                const std::optional<double> before = i >= p ? v[i - p] : std::nullopt;
                const std::optional<double> after = i + p < n ? v[i + p] : std::nullopt;
                if (before && after)
                    out[i] = 0.5 * (*before + *after);
                else if (before)
                    out[i] = *before;
                else if (after)
                    out[i] = *after;
            }
            break;
        }
    }
    return out;
}

/// Imputes the listed features; observed values are never changed.
inline DailySeries impute(const DailySeries& series, ImputationMethod method, const std::vector<Feature>& features) {
    DailySeries out = series;
    for (Feature f : features) {
        std::vector<double> filled;
        try {
            filled = impute_values(series.column(f), method);
        } catch (const Error& e) {
            fail(e.kind(), series.station + " " + std::string(feature_name(f)) + ": " + e.what());
        }
        for (std::size_t i = 0; i < filled.size(); ++i) out.records[i][f] = filled[i];
    }
    return out;
}

inline DailySeries impute(const DailySeries& series, ImputationMethod method) {
    std::vector<Feature> all;
    for (std::size_t k = 0; k < kFeatureCount; ++k) all.push_back(static_cast<Feature>(k));
    return impute(series, method, all);
}

// ---------------------------------------------------------------------------
// Feature matrices and normalization

/// Rows are days, columns the requested features. Fails on any missing value.
inline Eigen::MatrixXd to_matrix(const DailySeries& s, const std::vector<Feature>& features) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t k = 0; k < features.size(); ++k) {
            const auto& v = s.records[i][features[k]];
            if (!v)
                fail(ErrorKind::AllMissing, s.station + " " + std::string(feature_name(features[k])) +
                                                " still missing on " + to_iso(s.records[i].date));
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *v;
        }
    return m;
}

/// Column means and population standard deviations.
inline NormalizationStats fit_normalizer(const Eigen::MatrixXd& train, std::vector<std::string> names) {
    if (train.rows() == 0) fail(ErrorKind::EmptyInput, "cannot fit normalizer on an empty split");
    if (static_cast<std::size_t>(train.cols()) != names.size())
        fail(ErrorKind::ShapeMismatch, "feature names do not match matrix columns");
    NormalizationStats st;
    st.features = std::move(names);
    const double n = static_cast<double>(train.rows());
    for (Eigen::Index k = 0; k < train.cols(); ++k) {
        const double mean = train.col(k).sum() / n;
        const double var = (train.col(k).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::abs(mean)))
            fail(ErrorKind::DegenerateFeature, "feature '" + st.features[static_cast<std::size_t>(k)] +
                                                   "' has zero variance");
        st.mean.push_back(mean);
        st.stddev.push_back(sd);
    }
    return st;
}

inline void check_stats(const NormalizationStats& st, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(st.size()) != cols || st.mean.size() != st.size() || st.stddev.size() != st.size())
        fail(ErrorKind::ShapeMismatch, "normalization stats do not match feature count");
    for (double sd : st.stddev)
        if (!(sd > 0.0)) fail(ErrorKind::DegenerateFeature, "stats hold a non-positive stddev");
}

inline Eigen::MatrixXd normalize(const Eigen::MatrixXd& x, const NormalizationStats& st) {
    check_stats(st, x.cols());
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        out.col(k) = (x.col(k).array() - st.mean[kk]) / st.stddev[kk];
    }
    return out;
}

inline Eigen::MatrixXd denormalize(const Eigen::MatrixXd& x, const NormalizationStats& st) {
    check_stats(st, x.cols());
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        out.col(k) = x.col(k).array() * st.stddev[kk] + st.mean[kk];
    }
    return out;
}

/// Stats restricted to a subset of named features, in the given order.
inline NormalizationStats select_stats(const NormalizationStats& st, const std::vector<std::string>& names) {
    NormalizationStats out;
    for (const auto& n : names) {
        const auto i = st.index_of(n);
        if (i == st.size()) fail(ErrorKind::ShapeMismatch, "no normalization stats for '" + n + "'");
        out.features.push_back(n);
        out.mean.push_back(st.mean[i]);
        out.stddev.push_back(st.stddev[i]);
    }
    return out;
}

inline constexpr std::string_view kStatsMagic = "agrowx-normalization";
inline constexpr int kStatsVersion = 1;

/// Text form: a versioned header line then `feature mean stddev` per line.
inline std::string write_stats(const NormalizationStats& st) {
    std::string out = std::string(kStatsMagic) + " " + std::to_string(kStatsVersion) + "\n";
    for (std::size_t i = 0; i < st.size(); ++i)
        out += st.features[i] + " " + text::format_double(st.mean[i]) + " " + text::format_double(st.stddev[i]) + "\n";
    return out;
}

inline NormalizationStats read_stats(std::string_view content) {
    const auto lines = text::content_lines(content);
    if (lines.empty()) fail(ErrorKind::Format, "empty normalization file");
    const auto head = text::split(text::trim(lines[0]), ' ');
    if (head.size() != 2 || head[0] != kStatsMagic) fail(ErrorKind::Format, "not a normalization file");
    if (head[1] != std::to_string(kStatsVersion))
        fail(ErrorKind::UnsupportedVersion, "normalization file version " + head[1]);
    NormalizationStats st;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = text::split(text::trim(lines[i]), ' ');
        if (f.size() != 3) fail(ErrorKind::Format, "normalization line needs 3 fields: " + lines[i]);
        st.features.push_back(f[0]);
        st.mean.push_back(text::require_double(f[1], "mean"));
        st.stddev.push_back(text::require_double(f[2], "stddev"));
    }
    check_stats(st, static_cast<Eigen::Index>(st.size()));
    return st;
}

// ---------------------------------------------------------------------------
// Chronological split

struct SplitSpec {
    double train_fraction = 0.70;
    double val_fraction = 0.20;
    double test_fraction = 0.10;
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

inline constexpr std::size_t kMinSplitLength = 10;

/// floor(train*n), floor(val*n), remainder.
inline SplitSizes split_sizes(std::size_t n, const SplitSpec& spec = {}) {
    if (std::abs(spec.train_fraction + spec.val_fraction + spec.test_fraction - 1.0) > 1e-9 ||
        spec.train_fraction <= 0 || spec.val_fraction < 0 || spec.test_fraction < 0)
        fail(ErrorKind::Config, "split fractions must be non-negative and sum to 1");
    if (n < kMinSplitLength) fail(ErrorKind::TooShort, "series of length " + std::to_string(n) + " is too short to split");
    // 0.7 * 100 floors to 70, not 69.
    const auto portion = [n](double f) {
        return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
    };
    SplitSizes s;
    s.train = portion(spec.train_fraction);
    s.val = portion(spec.val_fraction);
    s.test = n - s.train - s.val;
    return s;
}

struct Splits {
    Eigen::MatrixXd train, val, test;
};

inline Splits split(const Eigen::MatrixXd& rows, const SplitSpec& spec = {}) {
    const auto s = split_sizes(static_cast<std::size_t>(rows.rows()), spec);
    const auto tr = static_cast<Eigen::Index>(s.train), va = static_cast<Eigen::Index>(s.val),
               te = static_cast<Eigen::Index>(s.test);
    return {rows.topRows(tr), rows.middleRows(tr, va), rows.bottomRows(te)};
}

// ---------------------------------------------------------------------------
// Combined-station table

/// Weather features followed by one indicator column per station.
struct OneHotTable {
    std::vector<std::string> columns;
    std::vector<std::string> stations;
    std::vector<Eigen::MatrixXd> blocks;  // per station, rows = days
};

/// Appends station indicator columns to each station's feature matrix.
/// `station_order` fixes the indicator positions.
inline OneHotTable encode_station_onehot(const std::vector<std::string>& station_order,
                                         const std::vector<std::pair<std::string, Eigen::MatrixXd>>& per_station,
                                         const std::vector<std::string>& feature_names) {
    OneHotTable t;
    t.columns = feature_names;
    for (const auto& s : station_order) t.columns.push_back("station=" + s);
    t.stations = station_order;
    const auto nf = static_cast<Eigen::Index>(feature_names.size());
    const auto ns = static_cast<Eigen::Index>(station_order.size());
    for (const auto& [station, m] : per_station) {
        Eigen::Index idx = -1;
        for (Eigen::Index k = 0; k < ns; ++k)
            if (station_order[static_cast<std::size_t>(k)] == station) idx = k;
        if (idx < 0) fail(ErrorKind::UnknownStation, "station '" + station + "' not in the one-hot order");
        if (m.cols() != nf) fail(ErrorKind::ShapeMismatch, "feature block width mismatch for " + station);
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m.rows(), nf + ns);
        block.leftCols(nf) = m;
        block.col(nf + idx).setOnes();
        t.blocks.push_back(std::move(block));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Per-station preparation

/// One station's features normalized with statistics fitted on its training split.
struct PreparedSeries {
    std::string station;
    std::vector<std::string> features;
    NormalizationStats stats;
    Splits splits;  // normalized
};

inline std::vector<std::string> feature_labels(const std::vector<Feature>& features) {
    std::vector<std::string> out;
    for (Feature f : features) out.emplace_back(feature_name(f));
    return out;
}

inline PreparedSeries prepare(const DailySeries& imputed, const std::vector<Feature>& features,
                              const SplitSpec& spec = {}) {
    const Eigen::MatrixXd m = to_matrix(imputed, features);
    const Splits raw = split(m, spec);
    PreparedSeries p;
    p.station = imputed.station;
    p.features = feature_labels(features);
    p.stats = fit_normalizer(raw.train, p.features);
    p.splits = {normalize(raw.train, p.stats), normalize(raw.val, p.stats), normalize(raw.test, p.stats)};
    return p;
}

}  // namespace agrowx
