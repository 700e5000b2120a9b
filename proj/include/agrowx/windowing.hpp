#pragma once

#include "agrowx/error.hpp"
#include "agrowx/nn/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace agrowx {

/// Supervised framing: `input_width` steps in, and the final `label_width` steps
/// of a window of `input_width + shift` steps as labels.
struct WindowSpec {
    Eigen::Index input_width = 365;
    Eigen::Index label_width = 365;
    Eigen::Index shift = 1;

    [[nodiscard]] Eigen::Index total() const { return input_width + shift; }
    [[nodiscard]] Eigen::Index label_start() const { return total() - label_width; }

    void validate() const {
        if (input_width < 1 || label_width < 1 || shift < 1)
            fail(ErrorKind::Config, "window widths and shift must be >= 1");
        if (label_width > input_width)
            fail(ErrorKind::Config, "label_width cannot exceed input_width");
    }

    bool operator==(const WindowSpec&) const = default;
};

inline std::size_t window_count(Eigen::Index n, const WindowSpec& spec) {
    spec.validate();
    if (n < spec.total())
        fail(ErrorKind::TooShort, "series of length " + std::to_string(n) + " shorter than window of " +
                                      std::to_string(spec.total()));
    return static_cast<std::size_t>(n - spec.total() + 1);
}

struct SampleWindow {
    Eigen::MatrixXd inputs;  // input_width x features
    Eigen::MatrixXd labels;  // label_width x targets
};

/// Stride-1 windows over one or more row blocks (e.g. one per station). No window
/// crosses a block boundary. Every column is an input; `targets` selects label columns.
class WindowSet {
public:
    WindowSet() = default;
    WindowSet(std::vector<Eigen::MatrixXd> blocks, std::vector<Eigen::Index> targets, WindowSpec spec)
        : blocks_(std::move(blocks)), targets_(std::move(targets)), spec_(spec) {
        spec_.validate();
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (blocks_[b].cols() != blocks_.front().cols())
                fail(ErrorKind::ShapeMismatch, "window blocks differ in width");
            for (auto t : targets_)
                if (t < 0 || t >= blocks_[b].cols()) fail(ErrorKind::ShapeMismatch, "target column out of range");
            if (blocks_[b].rows() < spec_.total()) continue;
            for (Eigen::Index s = 0; s + spec_.total() <= blocks_[b].rows(); ++s) index_.emplace_back(b, s);
        }
    }

    WindowSet(const Eigen::MatrixXd& rows, std::vector<Eigen::Index> targets, WindowSpec spec)
        : WindowSet(std::vector<Eigen::MatrixXd>{rows}, std::move(targets), spec) {}

    [[nodiscard]] std::size_t size() const { return index_.size(); }
    [[nodiscard]] bool empty() const { return index_.empty(); }
    [[nodiscard]] const WindowSpec& spec() const { return spec_; }
    [[nodiscard]] Eigen::Index features() const { return blocks_.empty() ? 0 : blocks_.front().cols(); }
    [[nodiscard]] Eigen::Index targets() const { return static_cast<Eigen::Index>(targets_.size()); }
    [[nodiscard]] const std::vector<Eigen::Index>& target_columns() const { return targets_; }
    [[nodiscard]] std::pair<std::size_t, Eigen::Index> origin(std::size_t i) const { return index_.at(i); }

    [[nodiscard]] SampleWindow window(std::size_t i) const {
        const auto [b, s] = index_.at(i);
        const auto& m = blocks_[b];
        SampleWindow w;
        w.inputs = m.middleRows(s, spec_.input_width);
        w.labels.resize(spec_.label_width, targets());
        for (Eigen::Index k = 0; k < targets(); ++k)
            w.labels.col(k) = m.col(targets_[static_cast<std::size_t>(k)]).segment(s + spec_.label_start(),
                                                                                 spec_.label_width);
        return w;
    }

    /// Packs windows `ids` into step-major batch matrices:
    /// inputs (features x input_width*B), labels (targets x label_width*B).
    template <class S>
    void gather(const std::vector<std::size_t>& ids, nn::Mat<S>& inputs, nn::Mat<S>& labels) const {
        const auto batch = static_cast<Eigen::Index>(ids.size());
        inputs.resize(features(), spec_.input_width * batch);
        labels.resize(targets(), spec_.label_width * batch);
        for (Eigen::Index j = 0; j < batch; ++j) {
            const auto [b, s] = index_.at(ids[static_cast<std::size_t>(j)]);
            const auto& m = blocks_[b];
            for (Eigen::Index t = 0; t < spec_.input_width; ++t)
                inputs.col(t * batch + j) = m.row(s + t).transpose().template cast<S>();
            for (Eigen::Index t = 0; t < spec_.label_width; ++t)
                for (Eigen::Index k = 0; k < targets(); ++k)
                    labels(k, t * batch + j) =
                        static_cast<S>(m(s + spec_.label_start() + t, targets_[static_cast<std::size_t>(k)]));
        }
    }

private:
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<Eigen::Index> targets_;
    WindowSpec spec_;
    std::vector<std::pair<std::size_t, Eigen::Index>> index_;
};

/// All stride-1 windows of `rows`, ordered by start index.
inline std::vector<SampleWindow> make_windows(const Eigen::MatrixXd& rows, const WindowSpec& spec,
                                              const std::vector<Eigen::Index>& targets) {
    window_count(rows.rows(), spec);
    const WindowSet set(rows, targets, spec);
    std::vector<SampleWindow> out;
    out.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.window(i));
    return out;
}

/// Consecutive groups of `size`; only the last may be short.
template <class T>
std::vector<std::vector<T>> batch(const std::vector<T>& items, std::size_t size = 64) {
    if (size < 1) fail(ErrorKind::Config, "batch size must be >= 1");
    std::vector<std::vector<T>> out;
    for (std::size_t i = 0; i < items.size(); i += size)
        out.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(i),
                         items.begin() + static_cast<std::ptrdiff_t>(std::min(items.size(), i + size)));
    return out;
}

/// Window visiting order for one epoch: identity, or a permutation seeded by
/// (seed, epoch).
inline std::vector<std::size_t> epoch_order(std::size_t count, bool shuffle, std::uint64_t seed, int epoch) {
    std::vector<std::size_t> ids(count);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    if (shuffle) {
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(epoch + 1)));
        std::shuffle(ids.begin(), ids.end(), rng);
    }
    return ids;
}

}  // namespace agrowx
