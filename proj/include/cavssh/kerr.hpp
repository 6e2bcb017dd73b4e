#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cavssh/cavity.hpp"
#include "cavssh/errors.hpp"
#include "cavssh/numerics/newton.hpp"
#include "cavssh/numerics/polyfit.hpp"
#include "cavssh/parallel.hpp"

namespace cavssh {

inline constexpr double kKerrTolerance = 1e-12;
inline constexpr int kKerrMaxIter = 100;
inline constexpr int kKerrFitMax = 5;
inline constexpr double kKerrCriticalGuard = 0.02;

/// Root of ω − omega_c − sigma(ω, n) = 0 for any self-energy model; dsigma is ∂Σ/∂ω.
template <class Sigma, class DSigma>
NewtonResult solve_resonance(Sigma&& sigma, DSigma&& dsigma, double omega_c, int n, cplx seed,
                             double tol = kKerrTolerance, int max_iter = kKerrMaxIter) {
    if (n < 0) throw InvalidParameter("photon number must be >= 0");
    return complex_newton([&](cplx w) { return w - omega_c - sigma(w, n); },
                          [&](cplx w) { return 1.0 - dsigma(w, n); }, seed, tol, max_iter);
}

/// Self-consistent ω_n with Σ(ω, n) = (n + 1) g² S(ω) from a tabulated bubble.
/// The seed defaults to ω_c.
inline NewtonResult solve_omega_n(const PolarizationBubble& bubble, int n, const CavityParams& c,
                                  std::optional<cplx> seed = std::nullopt, double tol = kKerrTolerance,
                                  int max_iter = kKerrMaxIter) {
    c.validate();
    const double g2 = c.g * c.g;
    return solve_resonance([&](cplx w, int m) { return static_cast<double>(m + 1) * g2 * bubble.value(w); },
                           [&](cplx w, int m) { return static_cast<double>(m + 1) * g2 * bubble.derivative(w); },
                           c.omega_c, n, seed.value_or(cplx{c.omega_c, 0.0}), tol, max_iter);
}

/// ω_0..ω_{n_max}, each seeded from the previous root.
inline std::vector<cplx> solve_omega_ladder(const PolarizationBubble& bubble, int n_max, const CavityParams& c,
                                            double tol = kKerrTolerance, int max_iter = kKerrMaxIter) {
    if (n_max < 0) throw InvalidParameter("n_max must be >= 0");
    std::vector<cplx> roots;
    roots.reserve(static_cast<std::size_t>(n_max) + 1);
    cplx seed{c.omega_c, 0.0};
    for (int n = 0; n <= n_max; ++n) {
        seed = solve_omega_n(bubble, n, c, seed, tol, max_iter).root;
        roots.push_back(seed);
    }
    return roots;
}

inline NewtonResult solve_omega_n(int n, const SshParams& p, const CavityParams& c, std::size_t n_k,
                                  double tol = kKerrTolerance, int max_iter = kKerrMaxIter) {
    const PolarizationBubble bubble(p, c.eta, n_k);
    cplx seed{c.omega_c, 0.0};
    for (int m = 0; m < n; ++m) seed = solve_omega_n(bubble, m, c, seed, tol, max_iter).root;
    return solve_omega_n(bubble, n, c, seed, tol, max_iter);
}

struct KerrResult {
    cplx omega0;
    cplx U;
    cplx Uprime;
    std::vector<cplx> omega_n_list;
    double fit_residual = 0.0;
};

/// ω_n ≈ ω0 + U n + ½U′n², fitted separately to Re and Im of ω_n with n = 0, 1, ...
inline KerrResult kerr_from_fit(std::span<const cplx> omega_n_list) {
    if (omega_n_list.size() < 4) throw DegenerateDesign("Kerr fit needs at least 4 photon numbers");
    std::vector<double> ns(omega_n_list.size());
    std::vector<double> re(omega_n_list.size());
    std::vector<double> im(omega_n_list.size());
    for (std::size_t i = 0; i < omega_n_list.size(); ++i) {
        if (!detail::is_finite(omega_n_list[i])) throw NonFiniteSample("non-finite omega_n in Kerr fit");
        ns[i] = static_cast<double>(i);
        re[i] = omega_n_list[i].real();
        im[i] = omega_n_list[i].imag();
    }
    const QuadraticFit fr = polyfit_quadratic(ns, re);
    const QuadraticFit fi = polyfit_quadratic(ns, im);
    return {{fr.c0, fi.c0},
            {fr.c1, fi.c1},
            {fr.c2, fi.c2},
            {omega_n_list.begin(), omega_n_list.end()},
            std::hypot(fr.residual, fi.residual)};
}

/// U = g²·(1/2π)∫ dk |μ|²/(ω_c − Δ + iη)²
inline cplx kerr_closed_form(const PolarizationBubble& bubble, const CavityParams& c) {
    return (c.g * c.g) * bubble.squared(c.omega_c);
}

inline cplx kerr_closed_form(const SshParams& p, const CavityParams& c, std::size_t n_k = kDefaultBzPoints) {
    c.validate();
    return kerr_closed_form(PolarizationBubble(p, c.eta, n_k), c);
}

struct KerrScanRow {
    double r = 0.0;
    double omega_c = 0.0;
    bool converged = false;
    KerrResult fit;
    cplx U_closed;
    std::string error;
};

/// One row per r with t2 = r·t1 and ω_c re-pinned to 2|t1 − t2|. A row whose
/// Newton solve fails is kept with converged = false and the message in `error`.
inline std::vector<KerrScanRow> kerr_scan(std::span<const double> r_values, const SshParams& p_base,
                                          const CavityParams& c, std::size_t n_k, int n_max = kKerrFitMax,
                                          unsigned threads = 1) {
    p_base.validate();
    c.validate();
    for (double r : r_values) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("scan ratio must be finite and >= 0");
        if (std::abs(r - 1.0) < kKerrCriticalGuard) {
            throw CriticalPoint("scan ratio " + std::to_string(r) + " is inside the critical guard");
        }
    }
    std::vector<KerrScanRow> rows(r_values.size());
    parallel_for(r_values.size(), threads, [&](std::size_t i) {
        KerrScanRow& row = rows[i];
        row.r = r_values[i];
        const SshParams p{p_base.t1, row.r * p_base.t1};
        CavityParams pinned = c;
        pinned.omega_c = resonant_cavity_frequency(p);
        row.omega_c = pinned.omega_c;
        const PolarizationBubble bubble(p, pinned.eta, n_k);
        row.U_closed = kerr_closed_form(bubble, pinned);
        try {
            row.fit = kerr_from_fit(solve_omega_ladder(bubble, n_max, pinned));
            row.converged = true;
        } catch (const NoConvergence& e) {
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace cavssh
