#pragma once

#include "agrowx/error.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/nn/model.hpp"
#include "agrowx/preprocess.hpp"
#include "agrowx/training.hpp"
#include "agrowx/windowing.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace agrowx {

/// Windows for one prepared station. Every feature is also a target.
struct StationWindows {
    WindowSet train, val, test;
};

inline std::vector<Eigen::Index> leading_columns(Eigen::Index count) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(count));
    std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    return cols;
}

inline StationWindows make_station_windows(const PreparedSeries& p, const WindowSpec& spec) {
    const auto targets = leading_columns(static_cast<Eigen::Index>(p.features.size()));
    return {WindowSet(p.splits.train, targets, spec), WindowSet(p.splits.val, targets, spec),
            WindowSet(p.splits.test, targets, spec)};
}

enum class TrainingMode { PerStation, Combined };

inline const char* to_string(TrainingMode m) { return m == TrainingMode::PerStation ? "per-station" : "combined"; }

inline TrainingMode parse_training_mode(std::string_view s) {
    if (s == "per-station" || s == "per_station") return TrainingMode::PerStation;
    if (s == "combined") return TrainingMode::Combined;
    fail(ErrorKind::Config, "unknown mode '" + std::string(s) + "'");
}

struct Variant {
    std::string name;
    TrainingMode mode = TrainingMode::PerStation;
    bool bidirectional = true;
    int layers = 3;
    int units = 32;
    std::vector<int> dense_units{16};
    std::vector<Feature> features{Feature::Rainfall, Feature::Sunshine, Feature::Humidity, Feature::Temperature};
};

struct StationScore {
    std::string station;
    MetricsReport val;
    MetricsReport test;
};

struct VariantReport {
    Variant variant;
    std::vector<StationScore> stations;
    double mean_val_r2 = 0;
    double mean_test_r2 = 0;
};

struct ExperimentOptions {
    WindowSpec window;
    TrainConfig train;
    SplitSpec split;
    std::function<void(const std::string& variant, const std::string& model, const EpochLog&)> on_epoch;
};

namespace detail {

inline nn::Topology variant_topology(const Variant& v, int inputs, int targets) {
    if (v.layers < 1 || v.layers > 4) fail(ErrorKind::Config, "variant layers must be in [1, 4]");
    nn::Topology t;
    t.input_features = inputs;
    t.targets = targets;
    t.recurrent_layers = v.layers;
    t.units = v.units;
    t.bidirectional = v.bidirectional;
    t.dense_units = v.dense_units;
    return t;
}

inline void finish(VariantReport& r) {
    double val = 0, test = 0;
    for (const auto& s : r.stations) {
        val += s.val.r2;
        test += s.test.r2;
    }
    r.mean_val_r2 = val / static_cast<double>(r.stations.size());
    r.mean_test_r2 = test / static_cast<double>(r.stations.size());
}

inline VariantReport run_per_station(const std::vector<DailySeries>& stations, const Variant& v,
                                     const ExperimentOptions& opt) {
    VariantReport r{v, {}, 0, 0};
    const auto names = feature_labels(v.features);
    const int nf = static_cast<int>(names.size());
    for (const auto& s : stations) {
        const auto prepared = prepare(s, v.features, opt.split);
        const auto w = make_station_windows(prepared, opt.window);
        auto model = make_model<double>(variant_topology(v, nf, nf), names, names, opt.train.seed);
        model.stats = prepared.stats;
        train(model, w.train, w.val, opt.train, [&](const EpochLog& e) {
            if (opt.on_epoch) opt.on_epoch(v.name, s.station, e);
        });
        r.stations.push_back({s.station, evaluate(model, w.val, prepared.stats), evaluate(model, w.test, prepared.stats)});
    }
    return r;
}

// One model over all stations: features normalized with statistics pooled over
// every station's training split, station indicators appended as inputs.
inline VariantReport run_combined(const std::vector<DailySeries>& stations, const Variant& v,
                                  const ExperimentOptions& opt) {
    VariantReport r{v, {}, 0, 0};
    const auto names = feature_labels(v.features);
    const auto nf = static_cast<Eigen::Index>(names.size());

    std::vector<std::string> order;
    std::vector<Splits> raw;
    Eigen::Index pooled_rows = 0;
    for (const auto& s : stations) {
        order.push_back(s.station);
        raw.push_back(split(to_matrix(s, v.features), opt.split));
        pooled_rows += raw.back().train.rows();
    }
    Eigen::MatrixXd pooled(pooled_rows, nf);
    Eigen::Index at = 0;
    for (const auto& sp : raw) {
        pooled.middleRows(at, sp.train.rows()) = sp.train;
        at += sp.train.rows();
    }
    const auto stats = fit_normalizer(pooled, names);

    const auto encode = [&](Eigen::MatrixXd Splits::*part) {
        std::vector<std::pair<std::string, Eigen::MatrixXd>> per;
        for (std::size_t i = 0; i < raw.size(); ++i) per.emplace_back(order[i], normalize(raw[i].*part, stats));
        return encode_station_onehot(order, per, names);
    };
    const auto train_table = encode(&Splits::train);
    const auto val_table = encode(&Splits::val);
    const auto test_table = encode(&Splits::test);

    const auto targets = leading_columns(nf);
    const WindowSet train_set(train_table.blocks, targets, opt.window);
    const WindowSet val_set(val_table.blocks, targets, opt.window);
    const int inputs = static_cast<int>(train_table.columns.size());
    auto model = make_model<double>(variant_topology(v, inputs, static_cast<int>(nf)), train_table.columns, names,
                                    opt.train.seed);
    model.stats = stats;
    train(model, train_set, val_set, opt.train, [&](const EpochLog& e) {
        if (opt.on_epoch) opt.on_epoch(v.name, "combined", e);
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        const WindowSet val_i(val_table.blocks[i], targets, opt.window);
        const WindowSet test_i(test_table.blocks[i], targets, opt.window);
        r.stations.push_back({order[i], evaluate(model, val_i, stats), evaluate(model, test_i, stats)});
    }
    return r;
}

}  // namespace detail

/// Trains and scores every variant; the report is ordered by mean test R2,
/// best first (ties keep input order).
inline std::vector<VariantReport> compare_architectures(const std::vector<DailySeries>& stations,
                                                        const std::vector<Variant>& variants,
                                                        const ExperimentOptions& opt = {}) {
    if (stations.empty()) fail(ErrorKind::EmptyInput, "no stations to compare on");
    std::vector<VariantReport> out;
    for (const auto& v : variants) {
        auto r = v.mode == TrainingMode::PerStation ? detail::run_per_station(stations, v, opt)
                                                    : detail::run_combined(stations, v, opt);
        detail::finish(r);
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const VariantReport& a, const VariantReport& b) { return a.mean_test_r2 > b.mean_test_r2; });
    return out;
}

}  // namespace agrowx
