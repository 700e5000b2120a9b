#pragma once

#include "agrowx/error.hpp"
#include "agrowx/nn/activations.hpp"
#include "agrowx/nn/tensor.hpp"

#include <string>
#include <utility>

namespace agrowx::nn {

/// Parameters of one LSTM direction. Gate rows are stacked in the order
/// input, forget, candidate, output (each `units` rows).
template <class S>
struct LstmParams {
    Mat<S> w_input;      // 4u x in
    Mat<S> w_recurrent;  // 4u x u
    Vec<S> bias;         // 4u

    LstmParams() = default;
    LstmParams(Eigen::Index inputs, Eigen::Index units)
        : w_input(Mat<S>::Zero(4 * units, inputs)),
          w_recurrent(Mat<S>::Zero(4 * units, units)),
          bias(Vec<S>::Zero(4 * units)) {}

    [[nodiscard]] Eigen::Index units() const { return w_recurrent.cols(); }
    [[nodiscard]] Eigen::Index inputs() const { return w_input.cols(); }

    template <class F>
    void visit(const std::string& prefix, F&& f) {
        f(make_ref<S>(prefix + ".w_input", w_input, true));
        f(make_ref<S>(prefix + ".w_recurrent", w_recurrent, true));
        f(make_ref<S>(prefix + ".bias", bias, false));
    }
};

/// One time step for a single sample.
template <class S>
std::pair<Vec<S>, Vec<S>> lstm_cell(const Vec<S>& x, const Vec<S>& h_prev, const Vec<S>& c_prev,
                                    const LstmParams<S>& p) {
    const Eigen::Index u = p.units();
    if (x.size() != p.inputs() || h_prev.size() != u || c_prev.size() != u)
        fail(ErrorKind::ShapeMismatch, "lstm_cell input sizes do not match parameters");
    const Vec<S> z = p.w_input * x + p.w_recurrent * h_prev + p.bias;
    const auto i = sigmoid(z.segment(0, u).array()).eval();
    const auto f = sigmoid(z.segment(u, u).array()).eval();
    const auto g = fast_tanh(z.segment(2 * u, u).array()).eval();
    const auto o = sigmoid(z.segment(3 * u, u).array()).eval();
    Vec<S> c = (f * c_prev.array() + i * g).matrix();
    Vec<S> h = (o * fast_tanh(c.array())).matrix();
    return {std::move(h), std::move(c)};
}

/// Activations of one direction over a batch, kept for the backward pass.
/// Sequence batches are laid out as (features x steps*batch) with the columns of
/// step t in [t*batch, (t+1)*batch).
template <class S>
struct LstmTrace {
    Mat<S> gates;  // activated i, f, g, o
    Mat<S> cell;
    Mat<S> cell_tanh;
    Mat<S> hidden;
};

template <class S>
void lstm_forward(const LstmParams<S>& p, const Mat<S>& x, Eigen::Index steps, Eigen::Index batch,
                  bool reverse, LstmTrace<S>& tr) {
    const Eigen::Index u = p.units();
    if (x.rows() != p.inputs() || x.cols() != steps * batch)
        fail(ErrorKind::ShapeMismatch, "lstm_forward: input is " + std::to_string(x.rows()) + "x" +
                                           std::to_string(x.cols()));
    tr.gates.noalias() = p.w_input * x;
    tr.gates.colwise() += p.bias;
    tr.cell.resize(u, steps * batch);
    tr.cell_tanh.resize(u, steps * batch);
    tr.hidden.resize(u, steps * batch);

    for (Eigen::Index s = 0; s < steps; ++s) {
        const Eigen::Index t = reverse ? steps - 1 - s : s;
        const Eigen::Index prev = reverse ? t + 1 : t - 1;
        auto z = tr.gates.middleCols(t * batch, batch);
        if (s > 0) z.noalias() += p.w_recurrent * tr.hidden.middleCols(prev * batch, batch);

        auto ifo_i = z.topRows(2 * u).array();
        ifo_i = sigmoid(ifo_i).eval();
        auto o = z.bottomRows(u).array();
        o = sigmoid(o).eval();
        auto g = z.middleRows(2 * u, u).array();
        g = fast_tanh(g).eval();

        auto c = tr.cell.middleCols(t * batch, batch).array();
        if (s > 0)
            c = z.middleRows(u, u).array() * tr.cell.middleCols(prev * batch, batch).array() +
                z.topRows(u).array() * g;
        else
            c = z.topRows(u).array() * g;
        auto tc = tr.cell_tanh.middleCols(t * batch, batch).array();
        tc = fast_tanh(c);
        tr.hidden.middleCols(t * batch, batch).array() = o * tc;
    }
}

/// Back-propagation through time. `d_hidden` holds dLoss/dh_t coming from the
/// layer above; recurrent contributions are accumulated here. Parameter
/// gradients are added into `grad`, and dLoss/dx is written to `d_input`.
template <class S>
void lstm_backward(const LstmParams<S>& p, const Mat<S>& x, const LstmTrace<S>& tr,
                   const Mat<S>& d_hidden, Eigen::Index steps, Eigen::Index batch, bool reverse,
                   LstmParams<S>& grad, Mat<S>& d_input) {
    const Eigen::Index u = p.units();
    Mat<S> dz(4 * u, steps * batch);
    Mat<S> dh_next = Mat<S>::Zero(u, batch);
    Mat<S> dc_next = Mat<S>::Zero(u, batch);
    Mat<S> dh(u, batch);
    Mat<S> dc(u, batch);

    for (Eigen::Index s = steps - 1; s >= 0; --s) {
        const Eigen::Index t = reverse ? steps - 1 - s : s;
        const Eigen::Index prev = reverse ? t + 1 : t - 1;
        const auto gates = tr.gates.middleCols(t * batch, batch);
        const auto i = gates.topRows(u).array();
        const auto f = gates.middleRows(u, u).array();
        const auto g = gates.middleRows(2 * u, u).array();
        const auto o = gates.bottomRows(u).array();
        const auto tc = tr.cell_tanh.middleCols(t * batch, batch).array();

        dh = d_hidden.middleCols(t * batch, batch) + dh_next;
        dc.array() = dh.array() * o * (S(1) - tc.square()) + dc_next.array();

        auto dzt = dz.middleCols(t * batch, batch);
        dzt.topRows(u).array() = dc.array() * g * i * (S(1) - i);
        if (s > 0)
            dzt.middleRows(u, u).array() =
                dc.array() * tr.cell.middleCols(prev * batch, batch).array() * f * (S(1) - f);
        else
            dzt.middleRows(u, u).setZero();
        dzt.middleRows(2 * u, u).array() = dc.array() * i * (S(1) - g.square());
        dzt.bottomRows(u).array() = dh.array() * tc * o * (S(1) - o);

        dc_next.array() = dc.array() * f;
        dh_next.noalias() = p.w_recurrent.transpose() * dzt;
    }

    grad.w_input.noalias() += dz * x.transpose();
    grad.bias += dz.rowwise().sum();
    if (steps > 1) {
        const Eigen::Index span = (steps - 1) * batch;
        if (!reverse)
            grad.w_recurrent.noalias() += dz.rightCols(span) * tr.hidden.leftCols(span).transpose();
        else
            grad.w_recurrent.noalias() += dz.leftCols(span) * tr.hidden.rightCols(span).transpose();
    }
    d_input.noalias() = p.w_input.transpose() * dz;
}

}  // namespace agrowx::nn
