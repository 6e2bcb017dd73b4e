#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include "cavssh/errors.hpp"
#include "cavssh/numerics/quadrature.hpp"

namespace cavssh {

/// Intra-cell (t1) and inter-cell (t2) hopping of the SSH chain.
/// Energies throughout the library are in units where t1 = 1 unless a caller says otherwise.
struct SshParams {
    double t1 = 1.0;
    double t2 = 0.5;

    [[nodiscard]] double ratio() const noexcept { return t2 / t1; }
    [[nodiscard]] bool topological() const noexcept { return t2 > t1; }

    void validate() const {
        if (!(t1 > 0.0) || !std::isfinite(t1)) throw InvalidParameter("SSH t1 must be positive and finite");
        if (!(t2 >= 0.0) || !std::isfinite(t2)) throw InvalidParameter("SSH t2 must be non-negative and finite");
    }
};

/// Quadratic expansion of the gap around k = π and the slope of the dipole there.
struct BandEdgeParams {
    double gap0 = 0.0;          // Δ0 = Δ(π)
    double curvature = 0.0;     // Δ″ at k = π
    double dipole_slope = 0.0;  // A, with |μ(π + q)| ≈ A|q|
};

struct BandPair {
    double valence = 0.0;
    double conduction = 0.0;
};

inline constexpr double kGaplessFloor = 1e-12;
inline constexpr double kCriticalTolerance = 1e-6;
inline constexpr double kBandEdgeStep = 1e-4;

namespace detail {

struct EdgeTrig {
    double sin_k;
    double cos_k;
    double cos_half_sq;  // cos²(k/2)
};

// Trigonometry measured from the nearer of k = 0 and k = ±π, so sin k, 1 + cos k and
// cos(k/2) keep full relative precision at the zone edge (and vanish exactly at ±π).
inline EdgeTrig edge_trig(double k) noexcept {
    constexpr double pi = std::numbers::pi;
    const double a = std::abs(k);
    double s = 0.0;
    double c = 0.0;
    double ch = 0.0;
    if (a < 0.5 * pi) {
        s = std::sin(a);
        c = std::cos(a);
        ch = std::cos(0.5 * a);
    } else {
        const double d = pi - a;
        s = std::sin(d);
        c = -std::cos(d);
        ch = std::sin(0.5 * d);
    }
    return {k < 0.0 ? -s : s, c, ch * ch};
}

inline void require_noncritical(const SshParams& p, double tolerance, const char* what) {
    if (std::abs(p.ratio() - 1.0) < tolerance) {
        throw CriticalPoint(std::string(what) + ": t2/t1 = " + std::to_string(p.ratio()) + " is at the gap closing");
    }
}

}  // namespace detail

/// Δ(k) = 2√(t1² + t2² + 2 t1 t2 cos k), evaluated as 2√((t1 − t2)² + 4 t1 t2 cos²(k/2)).
inline double band_gap(double k, const SshParams& p) noexcept {
    const auto trig = detail::edge_trig(k);
    const double d = p.t1 - p.t2;
    return 2.0 * std::sqrt(d * d + 4.0 * p.t1 * p.t2 * trig.cos_half_sq);
}

inline BandPair band_energies(double k, const SshParams& p) noexcept {
    const double half = 0.5 * band_gap(k, p);
    return {-half, half};
}

/// Interband current matrix element μ(k) = t1 t2 sin k / Δ(k).
inline double dipole(double k, const SshParams& p) {
    const double gap = band_gap(k, p);
    if (gap < kGaplessFloor) throw GaplessPoint("dipole evaluated at a gapless point k = " + std::to_string(k));
    return p.t1 * p.t2 * detail::edge_trig(k).sin_k / gap;
}

/// θ(k) = arg(t1 + t2 e^{−ik}), principal value in (−π, π].
inline double bloch_phase(double k, const SshParams& p) {
    const auto trig = detail::edge_trig(k);
    const double re = p.t1 + p.t2 * trig.cos_k;
    const double im = -p.t2 * trig.sin_k;
    if (std::hypot(re, im) < 0.5 * kGaplessFloor) {
        throw GaplessPoint("Bloch phase undefined where h(k) = 0, k = " + std::to_string(k));
    }
    const double theta = std::atan2(im, re);
    if (theta <= -std::numbers::pi) return std::numbers::pi;
    return theta + 0.0;  // drop the sign of a zero
}

/// Total change of the continuously unwrapped θ(k) across the zone (a multiple of 2π).
inline double bloch_phase_winding(const SshParams& p, std::size_t n_k) {
    p.validate();
    require_bz_points(n_k);
    detail::require_noncritical(p, kCriticalTolerance, "winding");
    double total = 0.0;
    double prev = bloch_phase(bz_point(0, n_k), p);
    for (std::size_t j = 1; j <= n_k; ++j) {
        const double cur = bloch_phase(bz_point(j, n_k), p);
        total += std::remainder(cur - prev, 2.0 * std::numbers::pi);
        prev = cur;
    }
    return total;
}

/// Zak phase of the valence band from the discrete Wilson loop
/// γ = −arg Π_j ⟨u_v(k_j)|u_v(k_{j+1})⟩, reported in [0, 2π).
inline double zak_phase(const SshParams& p, std::size_t n_k) {
    p.validate();
    require_bz_points(n_k);
    detail::require_noncritical(p, kCriticalTolerance, "zak_phase");

    // u_v(k) = (−e^{−iθ}, 1)/√2, so ⟨u_v(k_j)|u_v(k_{j+1})⟩ = (1 + e^{−i(θ_{j+1} − θ_j)})/2.
    std::complex<double> loop{1.0, 0.0};
    double prev = bloch_phase(bz_point(0, n_k), p);
    for (std::size_t j = 1; j <= n_k; ++j) {
        const double cur = bloch_phase(bz_point(j, n_k), p);
        const std::complex<double> overlap = 0.5 * (1.0 + std::polar(1.0, -(cur - prev)));
        loop *= overlap / std::abs(overlap);
        prev = cur;
    }
    // A phase a rounding error below zero wraps to just under 2π; report it as 0.
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double gamma = -std::arg(loop);
    if (gamma < 0.0) gamma += two_pi;
    if (two_pi - gamma < 1e-12) gamma = 0.0;
    return gamma;
}

/// Δ0, Δ″ and A by central differences at k = π with step kBandEdgeStep.
/// |μ| has a kink at π, so A is the magnitude of the central slope of the signed μ.
inline BandEdgeParams band_edge_params(const SshParams& p) {
    p.validate();
    detail::require_noncritical(p, kCriticalTolerance, "band_edge_params");
    constexpr double pi = std::numbers::pi;
    constexpr double h = kBandEdgeStep;
    BandEdgeParams edge;
    edge.gap0 = band_gap(pi, p);
    edge.curvature = (band_gap(pi + h, p) - 2.0 * edge.gap0 + band_gap(pi - h, p)) / (h * h);
    edge.dipole_slope = std::abs(dipole(pi + h, p) - dipole(pi - h, p)) / (2.0 * h);
    return edge;
}

/// Closed forms Δ0 = 2|t1 − t2|, Δ″ = 2 t1 t2/|t1 − t2|, A = t1 t2/Δ0.
inline BandEdgeParams band_edge_params_closed_form(const SshParams& p) {
    p.validate();
    detail::require_noncritical(p, kCriticalTolerance, "band_edge_params_closed_form");
    const double delta = std::abs(p.t1 - p.t2);
    return {2.0 * delta, 2.0 * p.t1 * p.t2 / delta, p.t1 * p.t2 / (2.0 * delta)};
}

}  // namespace cavssh
