#pragma once

#include "agrowx/error.hpp"
#include "agrowx/nn/backprop.hpp"
#include "agrowx/nn/model.hpp"
#include "agrowx/normalization.hpp"
#include "agrowx/windowing.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace agrowx {

struct TrainConfig {
    double learning_rate = 0.001;
    int epochs = 100;
    int patience = 10;
    std::size_t batch_size = 64;
    double l1 = 1e-5;
    double l2 = 1e-5;
    std::uint64_t seed = 7;
    bool shuffle = false;
    /// Validation loss must drop by more than this to count as an improvement.
    double min_delta = 1e-7;

    void validate() const {
        if (!(learning_rate > 0)) fail(ErrorKind::Config, "learning_rate must be > 0");
        if (epochs < 1) fail(ErrorKind::Config, "epochs must be >= 1");
        if (patience < 1 || patience > epochs) fail(ErrorKind::Config, "patience must be in [1, epochs]");
        if (batch_size < 1) fail(ErrorKind::Config, "batch_size must be >= 1");
        if (l1 < 0 || l2 < 0) fail(ErrorKind::Config, "regularization strengths must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <class S>
struct AdamState {
    nn::Params<S> m;
    nn::Params<S> v;
    std::int64_t step = 0;

    AdamState() = default;
    explicit AdamState(const nn::Params<S>& like)
        : m(nn::Params<S>::zeros_like(like)), v(nn::Params<S>::zeros_like(like)) {}
};

/// One bias-corrected Adam update, in place.
template <class S>
void adam_step(nn::Params<S>& params, const nn::Params<S>& grads, AdamState<S>& state, double lr,
               const AdamConfig& cfg = {}) {
    auto ps = params.tensors();
    auto gs = const_cast<nn::Params<S>&>(grads).tensors();
    auto ms = state.m.tensors();
    auto vs = state.v.tensors();
    if (gs.size() != ps.size() || ms.size() != ps.size() || vs.size() != ps.size())
        fail(ErrorKind::ShapeMismatch, "adam: state does not match parameters");
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < ps.size(); ++k) {
        auto p = ps[k].values;
        auto g = gs[k].values;
        auto m = ms[k].values;
        auto v = vs[k].values;
        if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size())
            fail(ErrorKind::ShapeMismatch, "adam: tensor " + ps[k].name + " shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = static_cast<S>(cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i]);
            v[i] = static_cast<S>(cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i]);
            const double update = lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
            if (!std::isfinite(update)) fail(ErrorKind::NonFinite, "non-finite Adam update for " + ps[k].name);
            p[i] = static_cast<S>(p[i] - update);
        }
    }
}

// ---------------------------------------------------------------------------
// Metrics

struct MetricsReport {
    double mae = 0;
    double mse = 0;
    double msle = 0;
    double r2 = 0;
    double smape = 0;
};

inline double mean_absolute_error(std::span<const double> y, std::span<const double> yhat) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

inline double mean_squared_error(std::span<const double> y, std::span<const double> yhat) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

/// Requires every value > -1.
inline double mean_squared_log_error(std::span<const double> y, std::span<const double> yhat) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > -1.0) || !(yhat[i] > -1.0)) fail(ErrorKind::Format, "MSLE is undefined for values <= -1");
        const double d = std::log1p(y[i]) - std::log1p(yhat[i]);
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

/// 1 - SSE/SST with the mean taken over `y`. A constant `y` gives 1 when matched exactly, else 0.
inline double r_squared(std::span<const double> y, std::span<const double> yhat) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sse = 0, sst = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    if (sst == 0) return sse == 0 ? 1.0 : 0.0;
    return 1.0 - sse / sst;
}

/// Percent in [0, 200]; a pair of zeros contributes 0.
inline double smape(std::span<const double> y, std::span<const double> yhat) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double denom = (std::abs(y[i]) + std::abs(yhat[i])) / 2.0;
        if (denom > 0) s += std::abs(y[i] - yhat[i]) / denom;
    }
    return 100.0 * s / static_cast<double>(y.size());
}

inline MetricsReport compute_metrics(std::span<const double> y, std::span<const double> yhat) {
    if (y.empty()) fail(ErrorKind::EmptyInput, "no values to score");
    if (y.size() != yhat.size()) fail(ErrorKind::ShapeMismatch, "metric inputs differ in length");
    return {mean_absolute_error(y, yhat), mean_squared_error(y, yhat), mean_squared_log_error(y, yhat),
            r_squared(y, yhat), smape(y, yhat)};
}

/// Targets that are non-negative in physical units and so enter the MSLE.
inline bool is_nonnegative_target(const std::string& name) {
    return name == "rainfall" || name == "sunshine" || name == "humidity";
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int stopped_epoch = 0;  // 1-based
    int best_epoch = 0;     // 1-based
};

/// Patience counter over validation losses.
class EarlyStopping {
public:
    EarlyStopping(int patience, double min_delta) : patience_(patience), min_delta_(min_delta) {}

    /// Records one epoch; returns true when training should stop.
    bool update(double val_loss) {
        ++epoch_;
        if (val_loss < best_ - min_delta_) {
            best_ = val_loss;
            best_epoch_ = epoch_;
            improved_ = true;
            wait_ = 0;
        } else {
            improved_ = false;
            ++wait_;
        }
        return wait_ >= patience_;
    }

    [[nodiscard]] bool improved() const { return improved_; }
    [[nodiscard]] int best_epoch() const { return best_epoch_; }
    [[nodiscard]] double best() const { return best_; }

private:
    int patience_;
    double min_delta_;
    int epoch_ = 0;
    int wait_ = 0;
    int best_epoch_ = 0;
    bool improved_ = false;
    double best_ = std::numeric_limits<double>::infinity();
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0;
    double val_loss = 0;
};

/// Mean loss (MAE + weight penalty) of `params` over all windows of `set`.
template <class S>
double dataset_loss(const nn::Params<S>& params, const WindowSet& set, std::size_t batch_size,
                    const nn::Regularization& reg) {
    if (set.empty()) fail(ErrorKind::EmptyInput, "empty window set");
    const auto& spec = set.spec();
    nn::ForwardTrace<S> tr;
    nn::Mat<S> x, y;
    double abs_sum = 0;
    std::vector<std::size_t> ids;
    for (std::size_t start = 0; start < set.size(); start += batch_size) {
        ids.clear();
        for (std::size_t i = start; i < std::min(set.size(), start + batch_size); ++i) ids.push_back(i);
        set.gather(ids, x, y);
        const auto b = static_cast<Eigen::Index>(ids.size());
        const auto& pred = nn::forward_batch(params, x, spec.input_width, b, tr);
        abs_sum += static_cast<double>((pred.rightCols(spec.label_width * b) - y).array().abs().sum());
    }
    const double n = static_cast<double>(set.size()) * static_cast<double>(spec.label_width) *
                     static_cast<double>(set.targets());
    nn::Params<S> scratch = nn::Params<S>::zeros_like(params);
    return abs_sum / n + static_cast<double>(nn::apply_regularization(params, scratch, reg));
}

/// Adam on MAE + L1/L2 with early stopping on validation loss. The returned
/// model carries the weights of the best validation epoch.
template <class S>
TrainHistory train(nn::Model<S>& model, const WindowSet& train_set, const WindowSet& val_set,
                   const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch = {}) {
    cfg.validate();
    if (train_set.empty() || val_set.empty()) fail(ErrorKind::EmptyInput, "training needs non-empty splits");
    if (train_set.features() != model.topology.input_features || train_set.targets() != model.topology.targets)
        fail(ErrorKind::ShapeMismatch, "window set does not match model topology");

    const auto& spec = train_set.spec();
    const nn::Regularization reg{cfg.l1, cfg.l2};
    AdamState<S> adam(model.params);
    EarlyStopping stopper(cfg.patience, cfg.min_delta);
    nn::Params<S> best = model.params;
    TrainHistory h;
    nn::ForwardTrace<S> tr;
    nn::Mat<S> x, y;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto order = epoch_order(train_set.size(), cfg.shuffle, cfg.seed, epoch);
        double loss_sum = 0;
        for (const auto& ids : batch(order, cfg.batch_size)) {
            train_set.gather(ids, x, y);
            const auto b = static_cast<Eigen::Index>(ids.size());
            auto res = nn::gradients(model.params, x, y, spec.input_width, b, spec.label_width, reg, tr);
            if (!std::isfinite(static_cast<double>(res.loss)))
                fail(ErrorKind::Divergence, "training loss is not finite at epoch " + std::to_string(epoch));
            loss_sum += static_cast<double>(res.loss) * static_cast<double>(ids.size());
            adam_step(model.params, res.grads, adam, cfg.learning_rate);
        }
        const double train_loss = loss_sum / static_cast<double>(train_set.size());
        const double val_loss = dataset_loss(model.params, val_set, cfg.batch_size, reg);
        if (!std::isfinite(val_loss))
            fail(ErrorKind::Divergence, "validation loss is not finite at epoch " + std::to_string(epoch));
        h.train_loss.push_back(train_loss);
        h.val_loss.push_back(val_loss);
        h.stopped_epoch = epoch;
        const bool stop = stopper.update(val_loss);
        if (stopper.improved()) best = model.params;
        if (on_epoch) on_epoch({epoch, train_loss, val_loss});
        if (stop) break;
    }
    h.best_epoch = stopper.best_epoch();
    model.params = std::move(best);
    return h;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Flattened labels and predictions (normalized scale), window-major then
/// step then target.
struct Predictions {
    std::vector<double> labels;
    std::vector<double> predicted;
    Eigen::Index targets = 0;
};

template <class S>
Predictions predict_windows(const nn::Params<S>& params, const WindowSet& set, std::size_t batch_size = 64) {
    if (set.empty()) fail(ErrorKind::EmptyInput, "empty test set");
    const auto& spec = set.spec();
    Predictions out;
    out.targets = set.targets();
    nn::ForwardTrace<S> tr;
    nn::Mat<S> x, y;
    std::vector<std::size_t> ids;
    for (std::size_t start = 0; start < set.size(); start += batch_size) {
        ids.clear();
        for (std::size_t i = start; i < std::min(set.size(), start + batch_size); ++i) ids.push_back(i);
        set.gather(ids, x, y);
        const auto b = static_cast<Eigen::Index>(ids.size());
        const auto& pred = nn::forward_batch(params, x, spec.input_width, b, tr);
        const Eigen::Index off = (spec.input_width - spec.label_width) * b;
        for (Eigen::Index j = 0; j < b; ++j)
            for (Eigen::Index t = 0; t < spec.label_width; ++t)
                for (Eigen::Index k = 0; k < set.targets(); ++k) {
                    out.labels.push_back(static_cast<double>(y(k, t * b + j)));
                    out.predicted.push_back(static_cast<double>(pred(k, off + t * b + j)));
                }
    }
    return out;
}

/// MAE, MSE, R2 and SMAPE on the normalized scale over every (window, step,
/// target). MSLE uses physical units and only the non-negative targets, with
/// predictions clipped at 0.
inline MetricsReport score_predictions(const Predictions& p, const NormalizationStats& target_stats,
                                       const std::vector<std::string>& target_names) {
    if (p.labels.empty()) fail(ErrorKind::EmptyInput, "empty test set");
    MetricsReport r;
    r.mae = mean_absolute_error(p.labels, p.predicted);
    r.mse = mean_squared_error(p.labels, p.predicted);
    r.r2 = r_squared(p.labels, p.predicted);
    r.smape = smape(p.labels, p.predicted);

    std::vector<double> y, yhat;
    const auto k_count = static_cast<std::size_t>(p.targets);
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        const std::size_t k = i % k_count;
        if (!is_nonnegative_target(target_names[k])) continue;
        const double mu = target_stats.mean[k], sd = target_stats.stddev[k];
        y.push_back(p.labels[i] * sd + mu);
        yhat.push_back(std::max(0.0, p.predicted[i] * sd + mu));
    }
    r.msle = y.empty() ? 0.0 : mean_squared_log_error(y, yhat);
    return r;
}

/// `target_stats` holds the physical mean/stddev of each target column.
template <class S>
MetricsReport evaluate(const nn::Model<S>& model, const WindowSet& test_set, const NormalizationStats& target_stats) {
    if (test_set.empty()) fail(ErrorKind::EmptyInput, "EmptyTestSet: no test windows");
    return score_predictions(predict_windows(model.params, test_set), target_stats, model.target_names);
}

}  // namespace agrowx
