#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace classmap {

/// Consistency factor that makes the MAD unbiased for the normal sigma.
inline constexpr double kMadConsistency = 1.4826;

namespace detail {

template <typename Derived>
std::vector<typename Derived::Scalar> to_vector(const Eigen::DenseBase<Derived>& x) {
    std::vector<typename Derived::Scalar> out(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out[static_cast<std::size_t>(i)] = x.derived().coeff(i);
    return out;
}

} // namespace detail

/// Median of a vector; averages the two middle order statistics for even sizes.
/// NaN for empty input.
template <typename Scalar>
Scalar median_of(std::vector<Scalar> values) {
    const std::size_t n = values.size();
    if (n == 0)
        return std::numeric_limits<Scalar>::quiet_NaN();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const Scalar upper = values[mid];
    if (n % 2 == 1)
        return upper;
    const Scalar lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / Scalar(2);
}

template <typename Derived>
typename Derived::Scalar median(const Eigen::DenseBase<Derived>& x) {
    return median_of(detail::to_vector(x));
}

/// Scaled median absolute deviation around `center`.
template <typename Derived>
typename Derived::Scalar mad(const Eigen::DenseBase<Derived>& x, typename Derived::Scalar center) {
    using Scalar = typename Derived::Scalar;
    std::vector<Scalar> dev(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
        dev[static_cast<std::size_t>(i)] = std::abs(x.derived().coeff(i) - center);
    return Scalar(kMadConsistency) * median_of(std::move(dev));
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `prob` in [0, 1].
template <typename Scalar>
Scalar quantile_of(std::vector<Scalar> values, double prob) {
    if (values.empty())
        return std::numeric_limits<Scalar>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const Scalar frac = Scalar(h - static_cast<double>(lo));
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace classmap
