#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cavssh/errors.hpp"
#include "cavssh/grid.hpp"
#include "cavssh/numerics/svd.hpp"
#include "cavssh/parallel.hpp"
#include "cavssh/ssh.hpp"
#include "cavssh/vertex.hpp"

namespace cavssh {

/// Two-photon amplitude ψ(ω1, ω2) on a shared grid; rows index ω1.
struct BiphotonState {
    FrequencyGrid grid;
    Eigen::MatrixXcd amplitude;
    bool normalized = false;

    /// Σ|ψ|² dω²
    [[nodiscard]] double norm_squared() const {
        const double d = grid.spacing();
        return amplitude.squaredNorm() * d * d;
    }

    void normalize() {
        const double n2 = norm_squared();
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw ZeroNorm("biphoton amplitude has zero or non-finite norm");
        amplitude /= std::sqrt(n2);
        normalized = true;
    }
};

struct SchmidtSpectrum {
    std::vector<double> coefficients;  // λ_n, nonincreasing, summing to 1
    double entropy = 0.0;              // nats
    double entropy_bits = 0.0;
};

/// ψ = φ(ω1)φ(ω2) with φ ∝ exp(−(ω − ω0)²/(4σ²)), so |φ|² has standard deviation σ.
inline BiphotonState input_state(const FrequencyGrid& grid, double omega0, double sigma) {
    grid.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("input width sigma must be > 0");
    const double slack = 1e-12 * std::max(1.0, std::abs(omega0) + 4.0 * sigma);
    if (grid.start > omega0 - 4.0 * sigma + slack || grid.stop < omega0 + 4.0 * sigma - slack) {
        throw GridTooNarrow("grid must span omega0 +/- 4 sigma");
    }
    Eigen::VectorXd phi(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double x = (grid[i] - omega0) / sigma;
        phi(static_cast<Eigen::Index>(i)) = std::exp(-0.25 * x * x);
    }
    BiphotonState s{grid, (phi * phi.transpose()).cast<cplx>(), false};
    s.normalize();
    return s;
}

/// Γ(ω_i, ω_j) sampled on the grid.
template <class F>
Eigen::MatrixXcd sample_vertex(const FrequencyGrid& grid, F&& vertex) {
    grid.validate();
    const auto n = static_cast<Eigen::Index>(grid.count);
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = vertex(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
        }
    }
    return m;
}

/// ψ_out = Γ ⊙ ψ_in, renormalized.
inline BiphotonState apply_vertex(const BiphotonState& state, const Eigen::MatrixXcd& gamma) {
    if (gamma.rows() != state.amplitude.rows() || gamma.cols() != state.amplitude.cols()) {
        throw InvalidParameter("vertex samples do not match the state grid");
    }
    BiphotonState out{state.grid, gamma.cwiseProduct(state.amplitude), false};
    out.normalize();
    return out;
}

/// λ_n = σ_n²/Σσ² from the singular values of ψ·dω; S = −Σ λ ln λ.
inline SchmidtSpectrum schmidt_decompose(const BiphotonState& state) {
    const Eigen::MatrixXcd scaled = state.amplitude * state.grid.spacing();
    const std::vector<double> sv = svd_singular_values(scaled);
    double total = 0.0;
    for (double s : sv) total += s * s;
    if (!(total > 0.0)) throw ZeroNorm("Schmidt decomposition of a zero state");
    SchmidtSpectrum out;
    out.coefficients.reserve(sv.size());
    for (double s : sv) {
        const double lambda = s * s / total;
        out.coefficients.push_back(lambda);
        if (lambda > 0.0) out.entropy -= lambda * std::log(lambda);
    }
    out.entropy_bits = out.entropy / std::numbers::ln2;
    return out;
}

struct AnalyticSchmidt {
    std::vector<double> printed;     // λ0 x^n with the closed-form λ0, not normalized
    std::vector<double> normalized;  // (1 − x) x^n
    double ratio = 0.0;              // x = ζ/(1 + ζ)
};

inline AnalyticSchmidt analytic_schmidt(double zeta, int n_max) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) throw InvalidParameter("analytic Schmidt spectrum needs zeta > 0");
    if (n_max < 0) throw InvalidParameter("n_max must be >= 0");
    const double x = zeta / (1.0 + zeta);
    const double z1 = 1.0 + zeta;
    const double lambda0 = std::sqrt(2.0 * zeta * z1 * z1 / (std::numbers::pi * (z1 * z1 + zeta * zeta)));
    AnalyticSchmidt out{{}, {}, x};
    double printed = lambda0;
    double norm = 1.0 - x;
    for (int n = 0; n <= n_max; ++n) {
        out.printed.push_back(printed);
        out.normalized.push_back(norm);
        printed *= x;
        norm *= x;
    }
    return out;
}

/// exp(−ζ(q*(ω1) − q*(ω2))²) on the grid; below threshold q* = 0.
inline Eigen::MatrixXcd stationary_kernel_matrix(const FrequencyGrid& grid, const BandEdgeParams& edge, double zeta,
                                                 double V0 = 1.0) {
    std::vector<double> q(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) q[i] = saddle_momentum(grid[i], edge);
    const auto n = static_cast<Eigen::Index>(grid.count);
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = q[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(j)];
            m(i, j) = V0 * std::exp(-zeta * d * d);
        }
    }
    return m;
}

struct GeometricFit {
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares line through (n, ln λ_n); ratio = e^slope. NaN when a λ_n is not positive.
inline GeometricFit geometric_fit(std::span<const double> lambdas) {
    const std::size_t m = lambdas.size();
    if (m < 2) throw DegenerateDesign("geometric fit needs at least two coefficients");
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(lambdas[i] > 0.0)) return {};
        y[i] = std::log(lambdas[i]);
    }
    double xm = 0.0;
    double ym = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xm += static_cast<double>(i);
        ym += y[i];
    }
    xm /= static_cast<double>(m);
    ym /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = static_cast<double>(i) - xm;
        const double dy = y[i] - ym;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - (ym + slope * (static_cast<double>(i) - xm));
        ss_res += r * r;
    }
    return {std::exp(slope), syy > 0.0 ? 1.0 - ss_res / syy : 1.0};
}

inline constexpr std::size_t kSchmidtFitModes = 4;

struct EntropyRow {
    double zeta = 0.0;
    bool ok = false;
    SchmidtSpectrum spectrum;
    GeometricFit fit;
    std::string error;
};

/// For each ζ: Gaussian input, stationary Gaussian kernel in q* coordinates, Schmidt
/// spectrum, and a geometric fit of the leading kSchmidtFitModes coefficients.
inline std::vector<EntropyRow> entropy_scan(std::span<const double> zeta_values, const FrequencyGrid& grid,
                                            double omega0, double sigma, const BandEdgeParams& edge, double V0 = 1.0,
                                            unsigned threads = 1) {
    for (std::size_t i = 0; i < zeta_values.size(); ++i) {
        if (!(zeta_values[i] >= 0.0) || !std::isfinite(zeta_values[i])) {
            throw InvalidParameter("zeta values must be finite and >= 0");
        }
        if (i > 0 && zeta_values[i] < zeta_values[i - 1]) throw InvalidParameter("zeta values must be sorted");
    }
    if (!(edge.curvature > 0.0)) throw InvalidParameter("band edge curvature must be positive");
    const BiphotonState in = input_state(grid, omega0, sigma);
    std::vector<EntropyRow> rows(zeta_values.size());
    parallel_for(zeta_values.size(), threads, [&](std::size_t i) {
        EntropyRow& row = rows[i];
        row.zeta = zeta_values[i];
        try {
            const BiphotonState out = apply_vertex(in, stationary_kernel_matrix(grid, edge, row.zeta, V0));
            row.spectrum = schmidt_decompose(out);
            const std::size_t m = std::min(kSchmidtFitModes, row.spectrum.coefficients.size());
            row.fit = geometric_fit(std::span<const double>(row.spectrum.coefficients.data(), m));
            row.ok = true;
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace cavssh
