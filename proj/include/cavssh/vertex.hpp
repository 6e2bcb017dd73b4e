#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cavssh/cavity.hpp"
#include "cavssh/errors.hpp"
#include "cavssh/numerics/quadrature.hpp"
#include "cavssh/parallel.hpp"
#include "cavssh/ssh.hpp"

namespace cavssh {

inline constexpr std::size_t kDefaultVertexPoints = 512;

/// V(k, k′) = V0·exp(−ζ(k − k′)²)
struct InteractionKernel {
    double V0 = 1.0;
    double zeta = 0.0;

    void validate() const {
        if (!std::isfinite(V0)) throw InvalidParameter("kernel V0 must be finite");
        if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw InvalidParameter("kernel zeta must be finite and >= 0");
    }
};

inline double interaction_kernel(double k, double k_prime, const InteractionKernel& kern) {
    const double d = k - k_prime;
    return kern.V0 * std::exp(-kern.zeta * d * d);
}

/// Γ⁽⁴⁾(ω1, ω2) by the trapezoid rule on an (n+1)² grid of (k, k′):
///   ∬ dk dk′/(2π)² μ²(k)/(ω1 − Δ(k) + iη) · V(k, k′) · μ²(k′)/(ω2 − Δ(k′) + iη)
/// The kernel depends on k − k′ only and is stored as a Toeplitz row.
class DirectVertex {
public:
    DirectVertex(const SshParams& p, double eta, const InteractionKernel& kern, std::size_t n_k2d,
                 double prefactor = 1.0)
        : eta_(eta), prefactor_(prefactor), n_(n_k2d) {
        p.validate();
        kern.validate();
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("vertex eta must be > 0");
        if (!std::isfinite(prefactor)) throw InvalidParameter("vertex prefactor must be finite");
        require_bz_points(n_k2d);
        weight_.resize(n_ + 1);
        gap_.resize(n_ + 1);
        toeplitz_.resize(n_ + 1);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n_);
        for (std::size_t j = 0; j <= n_; ++j) {
            const double k = bz_point(j, n_);
            const double mu = dipole(k, p);
            weight_[j] = bz_end_factor(j, n_) * mu * mu / static_cast<double>(n_);
            gap_[j] = band_gap(k, p);
            const double d = step * static_cast<double>(j);
            toeplitz_[j] = kern.V0 * std::exp(-kern.zeta * d * d);
        }
    }

    /// Symmetrized: ½[S(ω1, ω2) + S(ω2, ω1)], so swapping the arguments is exact.
    [[nodiscard]] cplx operator()(double omega1, double omega2) const {
        const std::vector<cplx> a = legs(omega1);
        const std::vector<cplx> b = legs(omega2);
        return combine(a, smeared(a), b, smeared(b));
    }

    /// Γ4 on every pair of `omegas`, row-major, each entry bit-identical to operator().
    [[nodiscard]] std::vector<cplx> matrix(std::span<const double> omegas, unsigned threads = 1) const {
        const std::size_t m = omegas.size();
        std::vector<std::vector<cplx>> leg(m);
        std::vector<std::vector<cplx>> smear(m);
        parallel_for(m, threads, [&](std::size_t i) {
            leg[i] = legs(omegas[i]);
            smear[i] = smeared(leg[i]);
        });
        std::vector<cplx> out(m * m);
        parallel_for(m, threads, [&](std::size_t i) {
            for (std::size_t j = 0; j < m; ++j) out[i * m + j] = combine(leg[i], smear[i], leg[j], smear[j]);
        });
        return out;
    }

private:
    std::vector<cplx> legs(double omega) const {
        std::vector<cplx> v(n_ + 1);
        const cplx shift{omega, eta_};
        for (std::size_t j = 0; j <= n_; ++j) v[j] = weight_[j] / (shift - gap_[j]);
        return v;
    }

    // (V b)_j = Σ_l V(j − l) b_l, pairwise.
    std::vector<cplx> smeared(const std::vector<cplx>& b) const {
        std::vector<cplx> out(n_ + 1);
        for (std::size_t j = 0; j <= n_; ++j) {
            out[j] = pairwise_reduce(0, n_ + 1, [&](std::size_t l) { return toeplitz_[j > l ? j - l : l - j] * b[l]; });
        }
        return out;
    }

    static cplx contract(const std::vector<cplx>& a, const std::vector<cplx>& vb) {
        return pairwise_reduce(0, a.size(), [&](std::size_t j) { return a[j] * vb[j]; });
    }

    cplx combine(const std::vector<cplx>& a, const std::vector<cplx>& va, const std::vector<cplx>& b,
                 const std::vector<cplx>& vb) const {
        const cplx out = prefactor_ * 0.5 * (contract(a, vb) + contract(b, va));
        if (!detail::is_finite(out)) throw NonFiniteSample("vertex not finite");
        return out;
    }

    double eta_;
    double prefactor_;
    std::size_t n_;
    std::vector<double> weight_;
    std::vector<double> gap_;
    std::vector<double> toeplitz_;
};

inline cplx gamma4_direct(double omega1, double omega2, const SshParams& p, const CavityParams& c,
                          const InteractionKernel& kern, std::size_t n_k2d = kDefaultVertexPoints,
                          double prefactor = 1.0) {
    c.validate();
    return DirectVertex(p, c.eta, kern, n_k2d, prefactor)(omega1, omega2);
}

struct SaddleSolution {
    double q_star = 0.0;
    double q_star_prime = 0.0;
    bool above_first = false;
    bool above_second = false;
};

/// q*(ω) = √(2(ω − Δ0)/Δ″), or 0 below threshold.
inline double saddle_momentum(double omega, const BandEdgeParams& edge) {
    const double radicand = 2.0 * (omega - edge.gap0) / edge.curvature;
    return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

/// Saddle momenta and threshold flags, without throwing.
inline SaddleSolution evaluate_saddle(double omega1, double omega2, const BandEdgeParams& edge) {
    return {saddle_momentum(omega1, edge), saddle_momentum(omega2, edge), omega1 >= edge.gap0, omega2 >= edge.gap0};
}

inline SaddleSolution saddle_points(double omega1, double omega2, const BandEdgeParams& edge) {
    if (!(edge.curvature > 0.0) || !std::isfinite(edge.curvature)) {
        throw InvalidParameter("band edge curvature must be positive");
    }
    const SaddleSolution s = evaluate_saddle(omega1, omega2, edge);
    if (!s.above_first || !s.above_second) {
        const int which = (s.above_first ? 0 : 1) + (s.above_second ? 0 : 2);
        throw BelowThreshold("photon frequency below the gap threshold " + std::to_string(edge.gap0), which);
    }
    return s;
}

/// Stationary-phase Γ⁽⁴⁾:
///   A⁴V0 (q* q′*)² e^{−ζ(q* − q′*)²} √(2π/ζ) / [(ω1 − Δ0 + iη)(ω2 − Δ0 + iη)]
inline cplx gamma4_stationary(double omega1, double omega2, const InteractionKernel& kern,
                              const BandEdgeParams& edge, double eta, double prefactor = 1.0) {
    kern.validate();
    if (kern.zeta == 0.0) throw ZeroRange("stationary-phase vertex diverges at zeta = 0");
    const SaddleSolution s = saddle_points(omega1, omega2, edge);
    const double a2 = edge.dipole_slope * edge.dipole_slope;
    const double qq = s.q_star * s.q_star_prime;
    const double dq = s.q_star - s.q_star_prime;
    const double real_part = prefactor * a2 * a2 * kern.V0 * qq * qq * std::exp(-kern.zeta * dq * dq) *
                             std::sqrt(2.0 * std::numbers::pi / kern.zeta);
    return real_part / (cplx{omega1 - edge.gap0, eta} * cplx{omega2 - edge.gap0, eta});
}

inline cplx gamma4_stationary(double omega1, double omega2, const SshParams& p, const InteractionKernel& kern,
                              double eta, double prefactor = 1.0) {
    return gamma4_stationary(omega1, omega2, kern, band_edge_params(p), eta, prefactor);
}

}  // namespace cavssh
