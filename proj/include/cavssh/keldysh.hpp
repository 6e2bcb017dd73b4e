#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include "cavssh/cavity.hpp"
#include "cavssh/errors.hpp"

namespace cavssh {

/// Bath temperature in energy units (k_B = 1).
struct ThermalState {
    double temperature = 0.0;

    void validate() const {
        if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
            throw InvalidParameter("temperature must be finite and >= 0");
        }
    }
};

/// n_B(ω) = 1/(e^{ω/T} − 1), zero at T = 0.
inline double bose_occupation(double omega, const ThermalState& th) {
    th.validate();
    if (!(omega > 0.0)) throw NonPositiveFrequency("Bose occupation needs omega > 0, got " + std::to_string(omega));
    if (th.temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / th.temperature);
}

/// Σ^K = −2i·Im Σ^R·(1 + 2n_B) for a given retarded self-energy.
inline cplx keldysh_self_energy_from(cplx sigma_r, double n_b) {
    return {0.0, -2.0 * sigma_r.imag() * (1.0 + 2.0 * n_b)};
}

inline cplx keldysh_self_energy(double omega, const SshParams& p, const CavityParams& c, const ThermalState& th,
                                std::size_t n_k = kDefaultBzPoints) {
    return keldysh_self_energy_from(photon_self_energy(omega, p, c, n_k), bose_occupation(omega, th));
}

/// G^K = G^R Σ^K G^A for a given retarded self-energy. With G^A = conj(G^R) this is
/// |G^R|² Σ^K, which keeps G^K purely imaginary.
inline cplx keldysh_green_from_sigma(double omega, double q, const CavityParams& c, cplx sigma, double n_b) {
    return std::norm(dressed_propagator_from_sigma(omega, q, c, sigma)) * keldysh_self_energy_from(sigma, n_b);
}

/// n(ω) = ½(G^K/(−2i·Im G^R) − 1).
///
/// The iη broadening in G^R is counted here as a zero-temperature loss channel,
/// Σ^K_η = 2iη, next to the bath term. Then n = Γ n_B/(Γ + η) with Γ = −Im Σ^R:
/// zero at T = 0 and n_B once the bath dominates the linewidth.
inline double occupation_from_sigma(double omega, double q, const CavityParams& c, cplx sigma, double n_b) {
    const cplx g_r = dressed_propagator_from_sigma(omega, q, c, sigma);
    if (std::abs(g_r.imag()) < std::numeric_limits<double>::min()) {
        throw ZeroSpectralWeight("Im G^R underflows at omega = " + std::to_string(omega));
    }
    const cplx sigma_k = keldysh_self_energy_from(sigma, n_b) + cplx{0.0, 2.0 * c.eta};
    const cplx g_k = std::norm(g_r) * sigma_k;
    const double ratio = (g_k / cplx{0.0, -2.0 * g_r.imag()}).real();
    return 0.5 * (ratio - 1.0);
}

inline cplx keldysh_green(double omega, double q, const SshParams& p, const CavityParams& c, const ThermalState& th,
                          std::size_t n_k = kDefaultBzPoints) {
    return keldysh_green_from_sigma(omega, q, c, photon_self_energy(omega, p, c, n_k), bose_occupation(omega, th));
}

/// A(ω, q) = −Im G^R/π along the Keldysh path.
inline double keldysh_spectral_function(double omega, double q, const SshParams& p, const CavityParams& c,
                                        std::size_t n_k = kDefaultBzPoints) {
    return spectral_from_green(dressed_propagator_from_sigma(omega, q, c, photon_self_energy(omega, p, c, n_k)));
}

inline double occupation(double omega, double q, const SshParams& p, const CavityParams& c, const ThermalState& th,
                         std::size_t n_k = kDefaultBzPoints) {
    return occupation_from_sigma(omega, q, c, photon_self_energy(omega, p, c, n_k), bose_occupation(omega, th));
}

}  // namespace cavssh
