#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>

#include "cavssh/errors.hpp"

namespace cavssh {

inline constexpr std::size_t kMinBzPoints = 64;
inline constexpr std::size_t kDefaultBzPoints = 4096;

namespace detail {

inline bool is_finite(double x) noexcept { return std::isfinite(x); }
inline bool is_finite(const std::complex<double>& z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline constexpr std::size_t kPairwiseBlock = 16;

}  // namespace detail

/// Sum term(i) for i in [begin, end) by recursive halving.
/// The association order depends only on the range, never on the caller.
template <class Term>
auto pairwise_reduce(std::size_t begin, std::size_t end, Term&& term) -> std::decay_t<decltype(term(begin))> {
    using T = std::decay_t<decltype(term(begin))>;
    if (end - begin <= detail::kPairwiseBlock) {
        T acc{};
        for (std::size_t i = begin; i < end; ++i) acc += term(i);
        return acc;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    T lhs = pairwise_reduce(begin, mid, term);
    T rhs = pairwise_reduce(mid, end, term);
    return lhs + rhs;
}

/// k_j = π(2j − n)/n for j = 0..n. Endpoints land exactly on ∓π and the grid is
/// exactly antisymmetric: k_{n−j} = −k_j.
inline double bz_point(std::size_t j, std::size_t n_k) noexcept {
    const double num = static_cast<double>(2 * j) - static_cast<double>(n_k);
    return std::numbers::pi * (num / static_cast<double>(n_k));
}

/// Trapezoid end-point factor on the closed BZ grid (1/2 at j = 0 and j = n).
inline double bz_end_factor(std::size_t j, std::size_t n_k) noexcept {
    return (j == 0 || j == n_k) ? 0.5 : 1.0;
}

inline void require_bz_points(std::size_t n_k) {
    if (n_k < kMinBzPoints) {
        throw InvalidParameter("BZ grid needs at least " + std::to_string(kMinBzPoints) + " intervals, got " +
                               std::to_string(n_k));
    }
}

/// (1/2π)∫_{−π}^{π} f(k) dk by the composite trapezoid on n_k intervals.
template <class F>
auto bz_integrate(F&& f, std::size_t n_k) -> std::decay_t<decltype(f(0.0))> {
    require_bz_points(n_k);
    auto sum = pairwise_reduce(0, n_k + 1, [&](std::size_t j) {
        const double k = bz_point(j, n_k);
        auto v = f(k);
        if (!detail::is_finite(v)) throw NonFiniteSample("integrand not finite at k = " + std::to_string(k));
        return bz_end_factor(j, n_k) * v;
    });
    return sum / static_cast<double>(n_k);
}

/// Composite Simpson on [a, b] with an even number of intervals.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t intervals) -> std::decay_t<decltype(f(a))> {
    if (intervals < 2 || intervals % 2 != 0) throw InvalidParameter("Simpson needs an even interval count >= 2");
    if (!(b > a)) throw InvalidParameter("Simpson needs b > a");
    const double h = (b - a) / static_cast<double>(intervals);
    auto sum = pairwise_reduce(0, intervals + 1, [&](std::size_t j) {
        const double x = (j == intervals) ? b : a + h * static_cast<double>(j);
        auto v = f(x);
        if (!detail::is_finite(v)) throw NonFiniteSample("integrand not finite at x = " + std::to_string(x));
        const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        return w * v;
    });
    return sum * (h / 3.0);
}

namespace detail {

// 8-point Gauss–Legendre on [−1, 1].
inline constexpr std::array<double, 4> kGlNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
inline constexpr std::array<double, 4> kGlWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};

}  // namespace detail

/// Composite 8-point Gauss–Legendre with `panels` equal panels on [a, b].
template <class F>
auto gauss_legendre(F&& f, double a, double b, std::size_t panels) -> std::decay_t<decltype(f(a))> {
    using T = std::decay_t<decltype(f(a))>;
    if (panels == 0) throw InvalidParameter("Gauss-Legendre needs at least one panel");
    const double width = (b - a) / static_cast<double>(panels);
    return pairwise_reduce(0, panels, [&](std::size_t p) {
        const double lo = a + width * static_cast<double>(p);
        const double mid = lo + 0.5 * width;
        const double half = 0.5 * width;
        T acc{};
        for (std::size_t i = 0; i < detail::kGlNodes.size(); ++i) {
            const double dx = half * detail::kGlNodes[i];
            T v = f(mid - dx) + f(mid + dx);
            if (!detail::is_finite(v)) throw NonFiniteSample("integrand not finite near x = " + std::to_string(mid));
            acc += detail::kGlWeights[i] * v;
        }
        return half * acc;
    });
}

/// Cauchy principal value of ∫_a^b f(x)/(x − pole) dx.
///
/// Inside the interval the symmetric window [pole − w, pole + w], w = distance to the
/// nearer end, is folded into the regular integrand (f(pole+t) − f(pole−t))/t. What is
/// left of the interval is integrated in s = ln|x − pole|, where f(x)/(x − pole) dx
/// becomes f dx/|x − pole| = f ds. A pole outside [a, b] gives the ordinary integral.
/// `panels` sets the Gauss–Legendre panel count of each piece.
template <class F>
double principal_value(F&& f, double pole, double a, double b, std::size_t panels) {
    if (!(b > a)) throw InvalidParameter("principal value needs b > a");
    if (pole == a || pole == b) throw PoleOnBoundary("pole at x = " + std::to_string(pole) + " lies on the boundary");

    auto right_tail = [&](double from, double to) {  // ∫ over x = pole + e^s
        return gauss_legendre([&](double s) { return static_cast<double>(f(pole + std::exp(s))); }, std::log(from),
                              std::log(to), panels);
    };
    auto left_tail = [&](double from, double to) {  // ∫ over x = pole − e^s, distances from..to
        return -gauss_legendre([&](double s) { return static_cast<double>(f(pole - std::exp(s))); }, std::log(from),
                               std::log(to), panels);
    };

    if (pole < a) return right_tail(a - pole, b - pole);
    if (pole > b) return left_tail(pole - b, pole - a);

    const double left = pole - a;
    const double right = b - pole;
    const double w = std::min(left, right);
    double result = gauss_legendre(
        [&](double t) { return (static_cast<double>(f(pole + t)) - static_cast<double>(f(pole - t))) / t; }, 0.0, w,
        panels);
    if (right > w) result += right_tail(w, right);
    if (left > w) result += left_tail(w, left);
    return result;
}

}  // namespace cavssh
