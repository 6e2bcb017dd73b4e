#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cavssh/errors.hpp"

namespace cavssh {

/// y ≈ c0 + c1·x + ½·c2·x². `residual` is the 2-norm of the fit residuals.
struct QuadraticFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double residual = 0.0;

    [[nodiscard]] double operator()(double x) const noexcept { return c0 + c1 * x + 0.5 * c2 * x * x; }
};

inline QuadraticFit polyfit_quadratic(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidParameter("polyfit: xs and ys differ in length");
    std::vector<double> distinct(xs.begin(), xs.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw DegenerateDesign("polyfit: need at least 3 distinct abscissae");

    const auto m = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        if (!std::isfinite(x) || !std::isfinite(ys[static_cast<std::size_t>(i)])) {
            throw NonFiniteSample("polyfit: non-finite data point");
        }
        design(i, 0) = 1.0;
        design(i, 1) = x;
        design(i, 2) = 0.5 * x * x;
        rhs(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
    QuadraticFit fit{c(0), c(1), c(2), 0.0};
    fit.residual = (design * c - rhs).norm();
    return fit;
}

}  // namespace cavssh
