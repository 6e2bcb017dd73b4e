#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "cavssh/errors.hpp"

namespace cavssh {

struct NewtonResult {
    std::complex<double> root;
    double residual = 0.0;  // |f(root)|
    int iterations = 0;
};

/// Newton–Raphson in the complex plane. Stops as soon as |f(z)| < tol.
/// Throws NoConvergence carrying the last iterate when max_iter steps do not suffice
/// or the derivative vanishes.
template <class F, class DF>
NewtonResult complex_newton(F&& f, DF&& df, std::complex<double> z0, double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidParameter("Newton tolerance must be positive");
    if (max_iter < 0) throw InvalidParameter("Newton max_iter must be non-negative");

    std::complex<double> z = z0;
    std::complex<double> fz = f(z);
    double residual = std::abs(fz);
    for (int it = 0;; ++it) {
        if (!std::isfinite(residual)) {
            throw NoConvergence("Newton residual became non-finite", z, residual, it);
        }
        if (residual < tol) return {z, residual, it};
        if (it == max_iter) break;
        const std::complex<double> slope = df(z);
        if (slope == std::complex<double>{0.0, 0.0}) {
            throw NoConvergence("Newton derivative vanished", z, residual, it);
        }
        z -= fz / slope;
        fz = f(z);
        residual = std::abs(fz);
    }
    throw NoConvergence("Newton did not reach |f| < " + std::to_string(tol) + " in " + std::to_string(max_iter) +
                            " iterations",
                        z, residual, max_iter);
}

/// Central-difference derivative of a holomorphic function, for callers without an
/// analytic derivative. The complex-step trick does not apply to functions that are
/// already complex-valued, so the step is taken along the real axis.
inline std::function<std::complex<double>(std::complex<double>)> numerical_derivative(
    std::function<std::complex<double>(std::complex<double>)> f, double step = 1e-6) {
    return [f = std::move(f), step](std::complex<double> z) { return (f(z + step) - f(z - step)) / (2.0 * step); };
}

}  // namespace cavssh
