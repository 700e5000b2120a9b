#pragma once

#include <Eigen/Core>

#include <cmath>
#include <concepts>

namespace agrowx::nn {

template <std::floating_point S>
S sigmoid(S x) {
    return S(1) / (S(1) + std::exp(-x));
}

/// x * sigmoid(x). Minimum is about -0.2785 at x = -1.2785.
template <std::floating_point S>
S swish(S x) {
    return x * sigmoid(x);
}

template <std::floating_point S>
S swish_grad(S x) {
    const S s = sigmoid(x);
    return s + x * s * (S(1) - s);
}

// Array forms. exp() is vectorized by Eigen for both float and double, so the
// logistic and tanh are expressed through it.

template <class Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
    using S = typename Derived::Scalar;
    return (S(1) + (-x).exp()).inverse();
}

template <class Derived>
auto fast_tanh(const Eigen::ArrayBase<Derived>& x) {
    using S = typename Derived::Scalar;
    return S(1) - S(2) * (S(1) + (S(2) * x).exp()).inverse();
}

template <class Derived>
auto swish(const Eigen::ArrayBase<Derived>& x) {
    return x * sigmoid(x);
}

template <class Derived>
auto swish_grad(const Eigen::ArrayBase<Derived>& x) {
    using S = typename Derived::Scalar;
    const auto s = sigmoid(x).eval();
    return (s + x * s * (S(1) - s)).eval();
}

}  // namespace agrowx::nn
