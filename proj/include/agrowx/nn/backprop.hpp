#pragma once

#include "agrowx/error.hpp"
#include "agrowx/nn/model.hpp"

#include <cmath>

namespace agrowx::nn {

struct Regularization {
    double l1 = 0.0;
    double l2 = 0.0;
};

template <class S>
struct GradientResult {
    S loss = 0;       // data term + penalty
    S data_loss = 0;  // mean absolute error
    Params<S> grads;
};

/// Penalty l1*sum|w| + l2*sum w^2 over the weight matrices (biases excluded).
/// Adds its gradient into `grads` and returns the penalty value.
template <class S>
S apply_regularization(const Params<S>& params, Params<S>& grads, const Regularization& reg) {
    if (reg.l1 == 0.0 && reg.l2 == 0.0) return S(0);
    auto ps = const_cast<Params<S>&>(params).tensors();
    auto gs = grads.tensors();
    S penalty = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        if (!ps[k].regularized) continue;
        auto w = ps[k].values;
        auto g = gs[k].values;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const S sign = w[i] > 0 ? S(1) : (w[i] < 0 ? S(-1) : S(0));
            penalty += S(reg.l1) * std::abs(w[i]) + S(reg.l2) * w[i] * w[i];
            g[i] += S(reg.l1) * sign + S(2 * reg.l2) * w[i];
        }
    }
    return penalty;
}

/// Loss and exact reverse-mode gradients for one batch.
///
/// `inputs` is (features x steps*batch) and `labels` is (targets x label_width*batch),
/// both step-major. Labels align with the last `label_width` model steps. The data
/// term is the mean absolute error over every label entry; its subgradient at a zero
/// residual is 0.
template <class S>
GradientResult<S> gradients(const Params<S>& p, const Mat<S>& inputs, const Mat<S>& labels,
                            Eigen::Index steps, Eigen::Index batch, Eigen::Index label_width,
                            const Regularization& reg, ForwardTrace<S>& tr) {
    if (label_width < 1 || label_width > steps || labels.cols() != label_width * batch ||
        labels.rows() != p.output.weight.rows())
        fail(ErrorKind::ShapeMismatch, "gradients: label block does not match model output");

    const Mat<S>& pred = forward_batch(p, inputs, steps, batch, tr);
    const S n = static_cast<S>(labels.size());

    GradientResult<S> out;
    out.grads = Params<S>::zeros_like(p);

    Mat<S> d_pred = Mat<S>::Zero(pred.rows(), pred.cols());
    {
        const auto residual = (pred.rightCols(label_width * batch) - labels).array();
        out.data_loss = residual.abs().sum() / n;
        d_pred.rightCols(label_width * batch).array() = residual.sign() / n;
    }

    const Mat<S>* top = &inputs;
    if (!p.hidden.empty())
        top = &tr.hidden.back().output;
    else if (!p.recurrent.empty())
        top = &tr.recurrent.back().output;

    out.grads.output.weight.noalias() = d_pred * top->transpose();
    out.grads.output.bias = d_pred.rowwise().sum();
    Mat<S> d_x = p.output.weight.transpose() * d_pred;

    for (std::size_t l = p.hidden.size(); l-- > 0;) {
        const auto& ht = tr.hidden[l];
        const Mat<S>& below = l > 0 ? tr.hidden[l - 1].output
                                    : (p.recurrent.empty() ? inputs : tr.recurrent.back().output);
        const Mat<S> d_pre = (d_x.array() * swish_grad(ht.pre.array())).matrix();
        out.grads.hidden[l].weight.noalias() = d_pre * below.transpose();
        out.grads.hidden[l].bias = d_pre.rowwise().sum();
        d_x.noalias() = p.hidden[l].weight.transpose() * d_pre;
    }

    for (std::size_t l = p.recurrent.size(); l-- > 0;) {
        const auto& layer = p.recurrent[l];
        auto& rt = tr.recurrent[l];
        auto& g = out.grads.recurrent[l];
        const Mat<S>& below = l > 0 ? tr.recurrent[l - 1].output : inputs;
        const Eigen::Index u = layer.forward.units();

        Mat<S> d_hidden = (d_x.topRows(u).array() * swish_grad(rt.forward.hidden.array())).matrix();
        Mat<S> d_below;
        lstm_backward(layer.forward, below, rt.forward, d_hidden, steps, batch, false, g.forward, d_below);
        if (layer.bidirectional) {
            d_hidden = (d_x.bottomRows(u).array() * swish_grad(rt.backward.hidden.array())).matrix();
            Mat<S> d_below_bwd;
            lstm_backward(layer.backward, below, rt.backward, d_hidden, steps, batch, true, g.backward,
                          d_below_bwd);
            d_below += d_below_bwd;
        }
        d_x = std::move(d_below);
    }

    out.loss = out.data_loss + apply_regularization(p, out.grads, reg);

    for (const auto& t : out.grads.tensors())
        for (S v : t.values)
            if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "gradient of " + t.name + " is not finite");
    return out;
}

template <class S>
GradientResult<S> gradients(const Params<S>& p, const Mat<S>& inputs, const Mat<S>& labels,
                            Eigen::Index steps, Eigen::Index batch, Eigen::Index label_width,
                            const Regularization& reg = {}) {
    ForwardTrace<S> tr;
    return gradients(p, inputs, labels, steps, batch, label_width, reg, tr);
}

}  // namespace agrowx::nn
