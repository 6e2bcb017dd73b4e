#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cavssh/errors.hpp"
#include "cavssh/grid.hpp"
#include "cavssh/numerics/quadrature.hpp"
#include "cavssh/parallel.hpp"
#include "cavssh/ssh.hpp"

namespace cavssh {

using cplx = std::complex<double>;

/// Cavity mode ω_c(q) = omega_c + mass_beta·q², coupled with strength g, broadened by eta.
struct CavityParams {
    double omega_c = 1.0;
    double mass_beta = 0.5;
    double g = 0.05;
    double eta = 0.01;

    [[nodiscard]] double mode(double q) const noexcept { return omega_c + mass_beta * q * q; }

    void validate() const {
        if (!std::isfinite(omega_c)) throw InvalidParameter("cavity omega_c must be finite");
        if (!(mass_beta >= 0.0) || !std::isfinite(mass_beta)) throw InvalidParameter("cavity mass_beta must be >= 0");
        if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidParameter("cavity g must be >= 0");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("cavity eta must be > 0");
    }
};

/// ω_c = 2|t1 − t2|, the resonant pinning used for the figure presets.
inline double resonant_cavity_frequency(const SshParams& p) { return 2.0 * std::abs(p.t1 - p.t2); }

/// Tabulated bubble S(z) = (1/2π)∫ dk μ(k)²/(z − Δ(k) + iη) on the trapezoid grid.
/// Building the table once lets sweeps and Newton iterations reuse μ² and Δ.
class PolarizationBubble {
public:
    PolarizationBubble(const SshParams& p, double eta, std::size_t n_k) : eta_(eta), n_k_(n_k) {
        p.validate();
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("bubble eta must be > 0");
        require_bz_points(n_k);
        weight_.resize(n_k + 1);
        gap_.resize(n_k + 1);
        for (std::size_t j = 0; j <= n_k; ++j) {
            const double k = bz_point(j, n_k);
            const double mu = dipole(k, p);
            weight_[j] = bz_end_factor(j, n_k) * mu * mu;
            gap_[j] = band_gap(k, p);
        }
    }

    [[nodiscard]] cplx value(cplx z) const { return reduce(z, 1, "bubble"); }

    /// (1/2π)∫ μ²/(z − Δ + iη)²
    [[nodiscard]] cplx squared(cplx z) const { return reduce(z, 2, "squared bubble"); }

    /// dS/dz = −squared(z)
    [[nodiscard]] cplx derivative(cplx z) const { return -squared(z); }

    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] std::size_t n_k() const noexcept { return n_k_; }

private:
    cplx reduce(cplx z, int power, const char* what) const {
        const cplx shift = z + cplx{0.0, eta_};
        const cplx sum = pairwise_reduce(0, weight_.size(), [&](std::size_t j) {
            const cplx inv = 1.0 / (shift - gap_[j]);
            return weight_[j] * (power == 1 ? inv : inv * inv);
        });
        const cplx out = sum / static_cast<double>(n_k_);
        if (!detail::is_finite(out)) {
            throw NonFiniteSample(std::string(what) + " not finite at omega = " + std::to_string(z.real()));
        }
        return out;
    }

    double eta_;
    std::size_t n_k_;
    std::vector<double> weight_;
    std::vector<double> gap_;
};

/// Σ^R(ω) = g²·(1/2π)∫ dk |μ|²/(ω − Δ + iη).
inline cplx photon_self_energy(const PolarizationBubble& bubble, double omega, const CavityParams& c) {
    return (c.g * c.g) * bubble.value(omega);
}

inline cplx photon_self_energy(double omega, const SshParams& p, const CavityParams& c,
                               std::size_t n_k = kDefaultBzPoints) {
    c.validate();
    return photon_self_energy(PolarizationBubble(p, c.eta, n_k), omega, c);
}

/// Σ^R(ω, n) = (n + 1)·Σ^R(ω).
inline cplx photon_self_energy_n(double omega, int n, const SshParams& p, const CavityParams& c,
                                 std::size_t n_k = kDefaultBzPoints) {
    if (n < 0) throw InvalidParameter("photon number must be >= 0");
    return static_cast<double>(n + 1) * photon_self_energy(omega, p, c, n_k);
}

/// G^R = 1/(ω − ω_c(q) − Σ + iη) for a given self-energy sample. Shared by the
/// Feshbach and Keldysh paths so both produce identical spectra.
inline cplx dressed_propagator_from_sigma(double omega, double q, const CavityParams& c, cplx sigma) {
    return 1.0 / (cplx{omega - c.mode(q), c.eta} - sigma);
}

inline double spectral_from_green(cplx green) { return -green.imag() / std::numbers::pi; }

inline cplx dressed_propagator(double omega, double q, const SshParams& p, const CavityParams& c,
                               std::size_t n_k = kDefaultBzPoints) {
    return dressed_propagator_from_sigma(omega, q, c, photon_self_energy(omega, p, c, n_k));
}

inline cplx advanced_propagator(double omega, double q, const SshParams& p, const CavityParams& c,
                                std::size_t n_k = kDefaultBzPoints) {
    return std::conj(dressed_propagator(omega, q, p, c, n_k));
}

/// A(ω, q) = −Im G^R/π
inline double spectral_function(double omega, double q, const SshParams& p, const CavityParams& c,
                                std::size_t n_k = kDefaultBzPoints) {
    return spectral_from_green(dressed_propagator(omega, q, p, c, n_k));
}

struct SpectralMap {
    FrequencyGrid omega_grid;
    FrequencyGrid q_grid;
    std::vector<double> values;  // row-major: omega index outer, q index inner

    [[nodiscard]] double at(std::size_t i_omega, std::size_t i_q) const { return values[i_omega * q_grid.count + i_q]; }
};

/// A(ω, q) on a grid. Σ depends on ω only, so it is evaluated once per row.
inline SpectralMap spectral_map(const FrequencyGrid& omega_grid, const FrequencyGrid& q_grid, const SshParams& p,
                                const CavityParams& c, std::size_t n_k = kDefaultBzPoints, unsigned threads = 1) {
    omega_grid.validate();
    q_grid.validate();
    c.validate();
    const PolarizationBubble bubble(p, c.eta, n_k);
    SpectralMap map{omega_grid, q_grid, std::vector<double>(omega_grid.count * q_grid.count)};
    parallel_for(omega_grid.count, threads, [&](std::size_t i) {
        const double omega = omega_grid[i];
        const cplx sigma = photon_self_energy(bubble, omega, c);
        for (std::size_t j = 0; j < q_grid.count; ++j) {
            map.values[i * q_grid.count + j] = spectral_from_green(dressed_propagator_from_sigma(omega, q_grid[j], c, sigma));
        }
    });
    return map;
}

struct HopfieldBranches {
    double lower = 0.0;
    double upper = 0.0;
};

/// Eigenvalues of [[βq² + Δπ, g], [g, Δπ]], ascending.
inline HopfieldBranches hopfield_branches(double q, double g_hop, double beta, double delta_pi) {
    const double detune = 0.5 * beta * q * q;
    const double mean = delta_pi + detune;
    const double split = std::hypot(detune, g_hop);
    return {mean - split, mean + split};
}

}  // namespace cavssh
