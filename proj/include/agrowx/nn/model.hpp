#pragma once

#include "agrowx/error.hpp"
#include "agrowx/nn/activations.hpp"
#include "agrowx/nn/lstm.hpp"
#include "agrowx/nn/tensor.hpp"
#include "agrowx/normalization.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace agrowx::nn {

/// Layer stack: `recurrent_layers` LSTM layers (bidirectional or not) returning
/// full sequences with swish on their outputs, then one time-distributed swish
/// dense per entry of `dense_units`, then a linear dense with `targets` units.
struct Topology {
    int input_features = 4;
    int targets = 4;
    int recurrent_layers = 3;
    int units = 32;
    bool bidirectional = true;
    std::vector<int> dense_units{16};

    [[nodiscard]] int recurrent_width() const { return bidirectional ? 2 * units : units; }

    bool operator==(const Topology&) const = default;
};

template <class S>
struct Dense {
    Mat<S> weight;  // out x in
    Vec<S> bias;

    Dense() = default;
    Dense(Eigen::Index inputs, Eigen::Index outputs)
        : weight(Mat<S>::Zero(outputs, inputs)), bias(Vec<S>::Zero(outputs)) {}

    template <class F>
    void visit(const std::string& prefix, F&& f) {
        f(make_ref<S>(prefix + ".weight", weight, true));
        f(make_ref<S>(prefix + ".bias", bias, false));
    }
};

template <class S>
struct RecurrentLayer {
    LstmParams<S> forward;
    LstmParams<S> backward;  // empty when unidirectional
    bool bidirectional = true;

    template <class F>
    void visit(const std::string& prefix, F&& f) {
        forward.visit(prefix + ".fwd", f);
        if (bidirectional) backward.visit(prefix + ".bwd", f);
    }
};

/// Every trainable tensor of a model. Gradients and optimizer moments use the
/// same structure.
template <class S>
struct Params {
    std::vector<RecurrentLayer<S>> recurrent;
    std::vector<Dense<S>> hidden;
    Dense<S> output;

    /// Zero-valued parameters shaped by `topo`.
    static Params zeros(const Topology& topo) {
        Params p;
        Eigen::Index width = topo.input_features;
        for (int l = 0; l < topo.recurrent_layers; ++l) {
            RecurrentLayer<S> layer;
            layer.bidirectional = topo.bidirectional;
            layer.forward = LstmParams<S>(width, topo.units);
            if (topo.bidirectional) layer.backward = LstmParams<S>(width, topo.units);
            p.recurrent.push_back(std::move(layer));
            width = topo.recurrent_width();
        }
        for (int units : topo.dense_units) {
            p.hidden.emplace_back(width, units);
            width = units;
        }
        p.output = Dense<S>(width, topo.targets);
        return p;
    }

    /// Zero-valued copy with the shapes of `other`.
    static Params zeros_like(const Params& other) {
        Params p = other;
        p.visit([](TensorRef<S> r) { std::fill(r.values.begin(), r.values.end(), S(0)); });
        return p;
    }

    template <class F>
    void visit(F&& f) {
        for (std::size_t l = 0; l < recurrent.size(); ++l) recurrent[l].visit("rnn" + std::to_string(l), f);
        for (std::size_t l = 0; l < hidden.size(); ++l) hidden[l].visit("dense" + std::to_string(l), f);
        output.visit("output", f);
    }

    [[nodiscard]] std::vector<TensorRef<S>> tensors() {
        std::vector<TensorRef<S>> out;
        visit([&](TensorRef<S> r) { out.push_back(std::move(r)); });
        return out;
    }
};

template <class S>
struct Model {
    Topology topology;
    Params<S> params;
    std::vector<std::string> feature_names;
    std::vector<std::string> target_names;
    std::uint64_t seed = 0;
    NormalizationStats stats;
};

inline std::int64_t lstm_param_count(std::int64_t units, std::int64_t inputs) {
    return 4 * units * (units + inputs + 1);
}

inline std::int64_t param_count(const Topology& topo) {
    std::int64_t n = 0;
    std::int64_t width = topo.input_features;
    const std::int64_t directions = topo.bidirectional ? 2 : 1;
    for (int l = 0; l < topo.recurrent_layers; ++l) {
        n += directions * lstm_param_count(topo.units, width);
        width = topo.recurrent_width();
    }
    for (int units : topo.dense_units) {
        n += width * units + units;
        width = units;
    }
    return n + width * topo.targets + topo.targets;
}

namespace detail {

template <class S>
void glorot_uniform(Mat<S>& w, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<S>(dist(rng));
}

// Columns of the (4u x u) recurrent matrix are orthonormal.
template <class S>
void orthogonal(Mat<S>& w, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat<double> a(w.rows(), w.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = dist(rng);
    Eigen::HouseholderQR<Mat<double>> qr(a);
    Mat<double> q = qr.householderQ() * Mat<double>::Identity(a.rows(), a.cols());
    const Mat<double> r = qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    w = q.cast<S>();
}

template <class S>
void init_lstm(LstmParams<S>& p, std::mt19937_64& rng) {
    glorot_uniform(p.w_input, rng);
    orthogonal(p.w_recurrent, rng);
    p.bias.setZero();
    p.bias.segment(p.units(), p.units()).setOnes();
}

}  // namespace detail

/// Glorot-uniform input and dense weights, orthogonal recurrent weights,
/// forget-gate bias 1, all other biases 0.
template <class S>
Params<S> init_params(const Topology& topo, std::uint64_t seed) {
    Params<S> p = Params<S>::zeros(topo);
    std::mt19937_64 rng(seed);
    for (auto& layer : p.recurrent) {
        detail::init_lstm(layer.forward, rng);
        if (layer.bidirectional) detail::init_lstm(layer.backward, rng);
    }
    for (auto& d : p.hidden) detail::glorot_uniform(d.weight, rng);
    detail::glorot_uniform(p.output.weight, rng);
    return p;
}

template <class S>
Model<S> make_model(const Topology& topo, std::vector<std::string> features,
                    std::vector<std::string> targets, std::uint64_t seed) {
    if (static_cast<int>(features.size()) != topo.input_features ||
        static_cast<int>(targets.size()) != topo.targets)
        fail(ErrorKind::ShapeMismatch, "feature/target names do not match topology");
    Model<S> m;
    m.topology = topo;
    m.params = init_params<S>(topo, seed);
    m.feature_names = std::move(features);
    m.target_names = std::move(targets);
    m.seed = seed;
    return m;
}

/// Intermediate activations of a batched forward pass.
template <class S>
struct ForwardTrace {
    Eigen::Index steps = 0;
    Eigen::Index batch = 0;
    struct Recurrent {
        LstmTrace<S> forward;
        LstmTrace<S> backward;
        Mat<S> output;  // swish of the concatenated hidden states
    };
    std::vector<Recurrent> recurrent;
    struct Hidden {
        Mat<S> pre;
        Mat<S> output;
    };
    std::vector<Hidden> hidden;
    Mat<S> prediction;  // targets x steps*batch
};

/// Batched forward pass. `inputs` is (features x steps*batch), step-major.
template <class S>
const Mat<S>& forward_batch(const Params<S>& p, const Mat<S>& inputs, Eigen::Index steps,
                            Eigen::Index batch, ForwardTrace<S>& tr) {
    if (steps < 1 || batch < 1 || inputs.cols() != steps * batch)
        fail(ErrorKind::ShapeMismatch, "forward_batch: bad sequence layout");
    tr.steps = steps;
    tr.batch = batch;
    tr.recurrent.resize(p.recurrent.size());
    tr.hidden.resize(p.hidden.size());

    const Mat<S>* x = &inputs;
    for (std::size_t l = 0; l < p.recurrent.size(); ++l) {
        const auto& layer = p.recurrent[l];
        auto& rt = tr.recurrent[l];
        lstm_forward(layer.forward, *x, steps, batch, false, rt.forward);
        const Eigen::Index u = layer.forward.units();
        if (layer.bidirectional) {
            lstm_forward(layer.backward, *x, steps, batch, true, rt.backward);
            rt.output.resize(2 * u, steps * batch);
            rt.output.topRows(u) = swish(rt.forward.hidden.array()).matrix();
            rt.output.bottomRows(u) = swish(rt.backward.hidden.array()).matrix();
        } else {
            rt.output = swish(rt.forward.hidden.array()).matrix();
        }
        x = &rt.output;
    }
    for (std::size_t l = 0; l < p.hidden.size(); ++l) {
        auto& ht = tr.hidden[l];
        if (x->rows() != p.hidden[l].weight.cols())
            fail(ErrorKind::ShapeMismatch, "dense layer input width mismatch");
        ht.pre.noalias() = p.hidden[l].weight * *x;
        ht.pre.colwise() += p.hidden[l].bias;
        ht.output = swish(ht.pre.array()).matrix();
        x = &ht.output;
    }
    if (x->rows() != p.output.weight.cols()) fail(ErrorKind::ShapeMismatch, "output layer input width mismatch");
    tr.prediction.noalias() = p.output.weight * *x;
    tr.prediction.colwise() += p.output.bias;
    return tr.prediction;
}

/// Single-sequence forward pass: (steps x features) in, (steps x targets) out.
template <class S>
Mat<S> forward(const Model<S>& model, const Mat<S>& inputs) {
    if (inputs.cols() != model.topology.input_features)
        fail(ErrorKind::ShapeMismatch, "forward: expected " + std::to_string(model.topology.input_features) +
                                           " feature columns, got " + std::to_string(inputs.cols()));
    ForwardTrace<S> tr;
    const Mat<S> x = inputs.transpose();
    return forward_batch(model.params, x, inputs.rows(), 1, tr).transpose();
}

/// Forward pass keeping only the final `label_width` steps.
template <class S>
Mat<S> predict(const Model<S>& model, const Mat<S>& inputs, Eigen::Index label_width) {
    if (label_width < 1 || label_width > inputs.rows())
        fail(ErrorKind::ShapeMismatch, "label width must be in [1, input width]");
    Mat<S> out = forward(model, inputs);
    return out.bottomRows(label_width);
}

}  // namespace agrowx::nn
