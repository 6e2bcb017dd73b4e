#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "cavssh/cavity.hpp"
#include "cavssh/errors.hpp"
#include "cavssh/numerics/quadrature.hpp"
#include "cavssh/ssh.hpp"

namespace cavssh {

enum class Band { conduction, valence };

/// G^R_cav(ω) = 1/(ω − ω_c + iη)
inline cplx bare_photon_green(double omega, const CavityParams& c) { return 1.0 / cplx{omega - c.omega_c, c.eta}; }

/// Σ^(c) = g²μ² G(ω − εv), Σ^(v) = g²μ² G(ω − εc).
inline cplx sigma_band(double k, double omega, Band band, const SshParams& p, const CavityParams& c) {
    const BandPair e = band_energies(k, p);
    const double mu = dipole(k, p);
    const double partner = band == Band::conduction ? e.valence : e.conduction;
    return (c.g * c.g * mu * mu) * bare_photon_green(omega - partner, c);
}

/// One-loop 2×2 self-energy in the (c, v) basis. The diagonal vanishes at this order.
struct FermionSelfEnergy {
    double k = 0.0;
    double omega = 0.0;
    cplx sigma_cc;
    cplx sigma_vv;
    cplx sigma_cv;
    cplx sigma_vc;
};

inline FermionSelfEnergy sigma_matrix(double k, double omega, const SshParams& p, const CavityParams& c) {
    const double gap = band_gap(k, p);
    const double mu = dipole(k, p);
    const double scale = c.g * c.g * mu * mu;
    return {k, omega, {}, {}, scale * bare_photon_green(omega - gap, c), scale * bare_photon_green(omega + gap, c)};
}

/// Default photon-momentum window 10·√(η/β).
inline double default_q_max(const CavityParams& c) {
    if (!(c.mass_beta > 0.0)) throw InvalidParameter("q_max has no default for a flat cavity (mass_beta = 0)");
    return 10.0 * std::sqrt(c.eta / c.mass_beta);
}

/// g² ∫_{−q_max}^{q_max} dq/2π μ(k)² G^R_cav(q, ω − ε) with ω_c(q) = ω_c + βq², by composite Simpson.
/// The coupling is taken independent of q.
inline cplx sigma_band_dispersive(double k, double omega, Band band, const SshParams& p, const CavityParams& c,
                                  std::size_t n_q = 1024, std::optional<double> q_max = std::nullopt) {
    if (n_q < 64) throw InvalidParameter("dispersive self-energy needs n_q >= 64");
    const double window = q_max ? *q_max : default_q_max(c);
    if (!(window > 0.0) || !std::isfinite(window)) throw InvalidParameter("q_max must be > 0");
    const BandPair e = band_energies(k, p);
    const double mu = dipole(k, p);
    const double x = omega - (band == Band::conduction ? e.valence : e.conduction);
    const cplx integral = simpson([&](double q) { return 1.0 / cplx{x - c.mode(q), c.eta}; }, -window, window,
                                  n_q + n_q % 2);
    return (c.g * c.g * mu * mu / (2.0 * std::numbers::pi)) * integral;
}

/// Re Σ^(c) from the spectral representation
///   Re G(x) = (1/π) P∫ dω′ Im G(ω′)/(ω′ − x),   x = ω − εv(k).
/// With ω′ = ω_c + η tan θ this is −(1/π) P∫_{−π/2}^{π/2} dθ/(η tan θ − d), d = x − ω_c,
/// whose only pole is θ0 = atan(d/η). `n_w` is the Gauss–Legendre panel count.
inline double lamb_shift(double k, double omega, const SshParams& p, const CavityParams& c, std::size_t n_w = 256) {
    c.validate();
    if (n_w == 0) throw InvalidParameter("lamb_shift needs n_w >= 1");
    const double mu = dipole(k, p);
    const double scale = c.g * c.g * mu * mu;
    if (scale == 0.0) return 0.0;
    const double d = omega - band_energies(k, p).valence - c.omega_c;
    const double eta = c.eta;
    const double theta0 = std::atan2(d, eta);
    const double cos0 = std::cos(theta0);
    // 1/(η tan θ − d) = cos θ cos θ0/(η sin(θ − θ0)); multiply by (θ − θ0) to strip the pole.
    auto regular = [&](double theta) {
        const double u = theta - theta0;
        const double sinc = u == 0.0 ? 1.0 : u / std::sin(u);
        return std::cos(theta) * cos0 * sinc / eta;
    };
    const double half_pi = 0.5 * std::numbers::pi;
    const double pv = principal_value(regular, theta0, -half_pi, half_pi, n_w);
    return -scale * pv / std::numbers::pi;
}

struct DressedBands {
    double e_plus = 0.0;
    double e_minus = 0.0;
};

/// E± = ±√((Δ/2)² + |Σ_cv|²)
inline DressedBands dressed_bands(double k, double omega, const SshParams& p, const CavityParams& c) {
    const double half = 0.5 * band_gap(k, p);
    const double coupling = std::abs(sigma_matrix(k, omega, p, c).sigma_cv);
    const double e = std::sqrt(half * half + coupling * coupling);
    return {e, -e};
}

}  // namespace cavssh
