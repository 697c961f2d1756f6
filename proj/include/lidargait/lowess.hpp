#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lidargait/stats.hpp"

namespace lidargait::lowess {

template <typename T>
constexpr T square(const T x) {
    return x * x;
}

template <typename T>
constexpr T cube(const T x) {
    return x * x * x;
}

template <typename T>
constexpr T triCube(const T x) {
    return cube(T(1) - cube(x));
}

template <typename T>
constexpr T biSquare(const T x) {
    return square(T(1) - square(x));
}

/// First index of the `span` samples nearest to `i` on a uniform grid of `n` samples.
inline Eigen::Index window_start(Eigen::Index i, Eigen::Index n, Eigen::Index span) {
    return std::clamp<Eigen::Index>(i - span / 2, 0, n - span);
}

/// Weighted first-order fit evaluated at sample `i` over [lo, lo + span).
///
/// Distance weights are tricube(|j - i| / h) with h one sample beyond the farthest window member, so every
/// window member keeps a positive distance weight. Falls back to the weighted mean when the weighted spread
/// of the abscissa vanishes, and to y[i] when every weight is zero.
template <typename DerivedY, typename DerivedW>
typename DerivedY::Scalar local_linear_fit(const Eigen::MatrixBase<DerivedY>& y,
                                           const Eigen::MatrixBase<DerivedW>& robustness, Eigen::Index i,
                                           Eigen::Index span) {
    using Scalar = typename DerivedY::Scalar;
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = y.size();
    const Eigen::Index lo = window_start(i, n, span);
    const Scalar h = Scalar(std::max(i - lo, lo + span - 1 - i) + 1);

    const Array x = Array::LinSpaced(span, Scalar(lo - i), Scalar(lo + span - 1 - i));
    const Array w = (x.abs() / h).unaryExpr([](Scalar u) { return triCube(u); }) *
                    robustness.segment(lo, span).array();
    const Array ys = y.segment(lo, span).array();

    const Scalar sum_w = w.sum();
    if (!(sum_w > Scalar(0)))
        return y(i);

    const Scalar x_bar = (w * x).sum() / sum_w;
    const Scalar y_bar = (w * ys).sum() / sum_w;
    const Array dx = x - x_bar;
    const Scalar sxx = (w * dx.square()).sum();
    if (sxx <= Scalar(1e-10) * sum_w * h * h)
        return y_bar;
    const Scalar slope = (w * dx * (ys - y_bar)).sum() / sxx;
    return y_bar - slope * x_bar;
}

/// Bisquare robustness weights from residuals; scale is six median absolute residuals, or six mean absolute
/// residuals when the median vanishes. Returns false when all residuals are negligible (fit already exact).
template <typename DerivedR, typename DerivedW>
bool robustness_weights(const Eigen::MatrixBase<DerivedR>& residuals, typename DerivedR::Scalar floor,
                        Eigen::MatrixBase<DerivedW>& weights) {
    using Scalar = typename DerivedR::Scalar;
    const auto abs_r = residuals.cwiseAbs().eval();
    Scalar scale = stats::median(std::vector<Scalar>(abs_r.data(), abs_r.data() + abs_r.size()));
    if (scale <= floor)
        scale = abs_r.mean();
    if (scale <= floor)
        return false;
    const Scalar cmad = Scalar(6) * scale;
    weights.derived() = abs_r.unaryExpr([cmad](Scalar r) { return r < cmad ? biSquare(r / cmad) : Scalar(0); });
    return true;
}

/// Robust locally weighted first-order smoothing of uniformly sampled data (abscissa = sample index).
///
/// `span` is the number of nearest samples in each local fit (odd, <= y.size()); `iterations` rounds of
/// bisquare reweighting follow the initial fit.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> robust_lowess(const Eigen::MatrixBase<Derived>& y,
                                                                          Eigen::Index span, int iterations) {
    using Scalar = typename Derived::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = y.size();
    Vector fitted = y;
    if (n < 2 || span < 2)
        return fitted;
    span = std::min(span, n);

    const Vector values = y;
    Vector robustness = Vector::Ones(n);
    const Scalar floor = Scalar(1e-12) * (Scalar(1) + values.cwiseAbs().mean());

    for (int pass = 0; pass <= iterations; ++pass) {
        for (Eigen::Index i = 0; i < n; ++i)
            fitted(i) = local_linear_fit(values, robustness, i, span);
        if (pass == iterations)
            break;
        const Vector residuals = values - fitted;
        if (!robustness_weights(residuals, floor, robustness))
            break;
    }
    return fitted;
}

} // namespace lidargait::lowess
