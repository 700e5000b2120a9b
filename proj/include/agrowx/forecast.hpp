#pragma once

#include "agrowx/advisor.hpp"
#include "agrowx/calendar.hpp"
#include "agrowx/error.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/model_store.hpp"
#include "agrowx/nn/model.hpp"
#include "agrowx/preprocess.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <string>
#include <vector>

namespace agrowx {

/// Model output for one input window, in physical units.
struct Forecast {
    std::string station;
    Date observed_until;             // last input day
    std::vector<Date> dates;         // one per predicted row
    std::vector<std::string> targets;
    Eigen::MatrixXd values;          // rows = dates, cols = targets
};

/// Runs the bundle's model on the most recent `input_width` days of `imputed`.
/// Row t of the label window is dated input_start + label_start + t, so the
/// last `shift` rows lie past the observed data. `horizon` keeps that many of
/// the latest rows and may not exceed the label width.
inline Forecast make_forecast(const store::ModelBundle& bundle, const DailySeries& imputed, Eigen::Index horizon = 0) {
    const auto& m = bundle.model;
    const auto& spec = bundle.window;
    if (horizon == 0) horizon = spec.label_width;
    if (horizon < 1 || horizon > spec.label_width)
        fail(ErrorKind::Config, "horizon " + std::to_string(horizon) + " exceeds the model's " +
                                    std::to_string(spec.label_width) + "-day label window");
    if (static_cast<Eigen::Index>(imputed.size()) < spec.input_width)
        fail(ErrorKind::TooShort, imputed.station + ": fewer observed days than the input width");

    std::vector<Feature> features;
    for (const auto& n : m.feature_names) features.push_back(parse_feature(n));
    const Eigen::MatrixXd all = to_matrix(imputed, features);
    const Eigen::MatrixXd window = normalize(all.bottomRows(spec.input_width), select_stats(m.stats, m.feature_names));
    const Eigen::MatrixXd pred = nn::predict(m, window, spec.label_width);
    const Eigen::MatrixXd phys = denormalize(pred, select_stats(m.stats, m.target_names));

    Forecast f;
    f.station = imputed.station;
    f.observed_until = imputed.records.back().date;
    f.targets = m.target_names;
    const Date input_start = imputed.records[imputed.size() - static_cast<std::size_t>(spec.input_width)].date;
    const Eigen::Index first = spec.label_width - horizon;
    for (Eigen::Index t = first; t < spec.label_width; ++t) f.dates.push_back(add_days(input_start, spec.label_start() + t));
    f.values = phys.bottomRows(horizon);
    return f;
}

/// Daily rows for aggregation and advice; needs the four weather targets.
inline std::vector<advisor::DailyForecast> to_daily(const Forecast& f) {
    const auto col = [&](std::string_view name) -> Eigen::Index {
        for (std::size_t k = 0; k < f.targets.size(); ++k)
            if (f.targets[k] == name) return static_cast<Eigen::Index>(k);
        fail(ErrorKind::Config, "forecast lacks target '" + std::string(name) + "'");
    };
    const auto r = col("rainfall"), s = col("sunshine"), h = col("humidity"), t = col("temperature");
    std::vector<advisor::DailyForecast> out;
    for (std::size_t i = 0; i < f.dates.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out.push_back({f.dates[i], std::max(0.0, f.values(row, r)), std::max(0.0, f.values(row, s)),
                       f.values(row, h), f.values(row, t)});
    }
    return out;
}

}  // namespace agrowx
