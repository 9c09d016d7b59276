#pragma once

// Local polynomial regression with tricube weights on the span-fraction
// nearest neighbours of each evaluation point (Cleveland's loess, direct
// evaluation, no robustness iterations).

#include "classmap/core.hpp"
#include "classmap/error.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <vector>

namespace classmap {

struct LoessOptions {
    double span = 0.75;
    int degree = 2;
    Eigen::Index grid_points = 100;
};

template <typename Scalar>
struct LoessCurve {
    VectorX<Scalar> x;
    VectorX<Scalar> y;
};

namespace detail {

template <typename Scalar>
Scalar tricube(Scalar u) {
    if (u >= Scalar(1))
        return Scalar(0);
    const Scalar t = Scalar(1) - u * u * u;
    return t * t * t;
}

inline void check_loess_options(Eigen::Index n, const LoessOptions& options) {
    if (!(options.span > 0.0 && options.span <= 1.0))
        throw ValidationError("loess span must lie in (0, 1]");
    if (options.degree != 1 && options.degree != 2)
        throw ValidationError("loess degree must be 1 or 2");
    if (n < 10)
        throw ValidationError("loess needs at least 10 points, got " + std::to_string(n));
}

} // namespace detail

/// Loess fit evaluated at `x0`.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar loess_at(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                   typename DerivedX::Scalar x0, const LoessOptions& options = {}) {
    using Scalar = typename DerivedX::Scalar;
    const Eigen::Index n = x.size();
    detail::check_loess_options(n, options);
    if (y.size() != n)
        throw ValidationError("loess inputs differ in length");

    const auto q = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(options.span * static_cast<double>(n))));
    std::vector<Scalar> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] = std::abs(x.derived().coeff(i) - x0);
    std::vector<Scalar> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + (q - 1), sorted.end());
    Scalar h = sorted[static_cast<std::size_t>(q - 1)];
    if (!(h > Scalar(0)))
        h = *std::max_element(dist.begin(), dist.end());
    if (!(h > Scalar(0)))
        return y.derived().mean();

    const int p = options.degree + 1;
    MatrixX<Scalar> design(n, p);
    VectorX<Scalar> rhs(n);
    Eigen::Index active = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar w = detail::tricube(dist[static_cast<std::size_t>(i)] / h);
        const Scalar sw = std::sqrt(w);
        const Scalar t = (x.derived().coeff(i) - x0) / h;
        Scalar power(1);
        for (int c = 0; c < p; ++c) {
            design(i, c) = sw * power;
            power *= t;
        }
        rhs(i) = sw * y.derived().coeff(i);
        active += w > Scalar(0);
    }
    if (active < p)
        throw ValidationError("loess neighbourhood has " + std::to_string(active) + " weighted points, degree " +
                              std::to_string(options.degree) + " needs " + std::to_string(p));
    const Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(design);
    if (qr.rank() < p)
        throw ValidationError("loess local fit is rank deficient (too few distinct x values in a neighbourhood)");
    return qr.solve(rhs)(0);
}

/// Loess curve sampled on an equispaced grid over [min x, max x].
template <typename DerivedX, typename DerivedY>
LoessCurve<typename DerivedX::Scalar> loess_curve(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& y,
                                                  const LoessOptions& options = {}) {
    using Scalar = typename DerivedX::Scalar;
    detail::check_loess_options(x.size(), options);
    if (options.grid_points < 2)
        throw ValidationError("loess grid needs at least two points");
    const Scalar lo = x.minCoeff();
    const Scalar hi = x.maxCoeff();
    LoessCurve<Scalar> curve;
    curve.x.resize(options.grid_points);
    curve.y.resize(options.grid_points);
    for (Eigen::Index k = 0; k < options.grid_points; ++k) {
        const Scalar t = Scalar(k) / Scalar(options.grid_points - 1);
        curve.x(k) = k + 1 == options.grid_points ? hi : lo + t * (hi - lo);
        curve.y(k) = loess_at(x, y, curve.x(k), options);
    }
    return curve;
}

} // namespace classmap
