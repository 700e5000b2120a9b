#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace agrowx::nn {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Named flat view of one parameter tensor. `regularized` marks weight matrices
/// that take the L1/L2 penalty; biases do not.
template <class S>
struct TensorRef {
    std::string name;
    std::span<S> values;
    bool regularized = false;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
};

template <class S, class Derived>
TensorRef<S> make_ref(std::string name, Eigen::PlainObjectBase<Derived>& t, bool regularized) {
    return {std::move(name), std::span<S>(t.data(), static_cast<std::size_t>(t.size())), regularized,
            t.rows(), t.cols()};
}

}  // namespace agrowx::nn
