#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cavssh/errors.hpp"

namespace cavssh {

/// Singular values in nonincreasing order. Works for real and complex matrices.
template <class Derived>
std::vector<double> svd_singular_values(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (!m.allFinite()) throw NonFiniteEntry("svd: matrix has non-finite entries");
    if (m.size() == 0) return {};

    const Matrix a = m;
    const Eigen::BDCSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    std::vector<double> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(s(i));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace cavssh
