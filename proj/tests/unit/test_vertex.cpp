#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cavssh/vertex.hpp"

using namespace cavssh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gaussian interaction kernel", "[vertex]") {
    const InteractionKernel kern{2.5, 4.0};
    CHECK(interaction_kernel(0.3, 0.3, kern) == 2.5);
    CHECK(interaction_kernel(-1.0, 2.0, {2.5, 0.0}) == 2.5);
    CHECK_THAT(interaction_kernel(0.5, 0.0, kern), WithinRel(2.5 / std::numbers::e, 1e-14));
    CHECK(interaction_kernel(0.1, 0.9, kern) == interaction_kernel(0.9, 0.1, kern));
    CHECK_THROWS_AS((InteractionKernel{1.0, -1.0}.validate()), InvalidParameter);
}

TEST_CASE("direct vertex is symmetric in its frequencies", "[vertex][property]") {
    const SshParams p{1.0, 0.5};
    const DirectVertex v(p, 1e-2, {1.0, 10.0}, 256);
    for (double a : {0.7, 1.05, 1.3, 2.2}) {
        for (double b : {0.9, 1.1, 1.25, 3.1}) {
            const cplx ab = v(a, b);
            const cplx ba = v(b, a);
            CHECK(ab == ba);
        }
    }
}

TEST_CASE("grid evaluation matches pointwise evaluation", "[vertex][property]") {
    const DirectVertex v({1.0, 0.5}, 1e-2, {1.0, 3.0}, 128);
    const std::vector<double> w{0.8, 1.02, 1.2, 1.9};
    for (unsigned threads : {1u, 3u}) {
        const auto m = v.matrix(w, threads);
        for (std::size_t i = 0; i < w.size(); ++i) {
            for (std::size_t j = 0; j < w.size(); ++j) CHECK(m[i * w.size() + j] == v(w[i], w[j]));
        }
    }
}

TEST_CASE("zero-range kernel factorizes into bubbles", "[vertex]") {
    for (double t2 : {0.5, 1.5}) {
        const SshParams p{1.0, t2};
        const double eta = 1e-2;
        const InteractionKernel kern{1.7, 0.0};
        const std::size_t n = 512;
        const DirectVertex v(p, eta, kern, n);
        const PolarizationBubble bubble(p, eta, n);
        for (auto [w1, w2] : std::vector<std::pair<double, double>>{{1.1, 1.2}, {0.8, 2.5}, {1.0, 1.0}}) {
            const cplx oracle = kern.V0 * bubble.value(w1) * bubble.value(w2);
            const cplx got = v(w1, w2);
            CHECK(std::abs(got - oracle) <= 1e-10 * std::abs(oracle));
        }
    }
}

TEST_CASE("vertex below the gap is nearly real", "[vertex]") {
    const SshParams p{1.0, 0.5};
    const double w = 0.8 * band_gap(std::numbers::pi, p);
    const cplx g = gamma4_direct(w, w, p, {1.0, 0.5, 0.05, 1e-3}, {1.0, 10.0}, 512);
    CHECK(std::abs(g.imag()) < 0.05 * std::abs(g.real()));
}

TEST_CASE("direct vertex converges under refinement", "[vertex]") {
    const SshParams p{1.0, 0.5};
    const CavityParams c{1.0, 0.5, 0.05, 1e-2};
    for (double zeta : {0.0, 1.0, 10.0}) {
        const cplx coarse = gamma4_direct(0.8, 0.9, p, c, {1.0, zeta}, 512);
        const cplx fine = gamma4_direct(0.8, 0.9, p, c, {1.0, zeta}, 1024);
        INFO("zeta = " << zeta);
        CHECK(std::abs(coarse - fine) < 1e-6 * std::abs(fine));
    }
}

TEST_CASE("saddle points", "[vertex]") {
    const BandEdgeParams edge = band_edge_params({1.0, 0.5});
    CHECK(saddle_points(edge.gap0, edge.gap0 + 0.1, edge).q_star == 0.0);
    CHECK_THAT(saddle_points(edge.gap0 + 0.5 * edge.curvature, edge.gap0, edge).q_star, WithinAbs(1.0, 1e-12));
    const auto s = saddle_points(1.2, 1.3, edge);
    CHECK(s.above_first);
    CHECK(s.above_second);
    CHECK_THAT(s.q_star_prime, WithinRel(std::sqrt(2.0 * 0.3 / edge.curvature), 1e-12));

    try {
        saddle_points(0.9, 1.2, edge);
        FAIL("expected BelowThreshold");
    } catch (const BelowThreshold& e) {
        CHECK(e.which() == 1);
    }
    try {
        saddle_points(1.2, 0.9, edge);
        FAIL("expected BelowThreshold");
    } catch (const BelowThreshold& e) {
        CHECK(e.which() == 2);
    }
    try {
        saddle_points(0.5, 0.9, edge);
        FAIL("expected BelowThreshold");
    } catch (const BelowThreshold& e) {
        CHECK(e.which() == 3);
    }
    const auto flags = evaluate_saddle(0.5, 1.5, edge);
    CHECK(flags.q_star == 0.0);
    CHECK_FALSE(flags.above_first);
    CHECK(flags.above_second);
}

TEST_CASE("stationary-phase vertex", "[vertex]") {
    const SshParams p{1.0, 0.5};
    const BandEdgeParams edge = band_edge_params(p);
    const InteractionKernel kern{1.0, 10.0};
    const double eta = 1e-2;
    const double w = 1.2;
    const double q = saddle_momentum(w, edge);
    const double a = edge.dipole_slope;
    const cplx expected = std::pow(a, 4) * q * q * q * q * std::sqrt(2.0 * std::numbers::pi / kern.zeta) /
                          (cplx{w - edge.gap0, eta} * cplx{w - edge.gap0, eta});
    const cplx got = gamma4_stationary(w, w, kern, edge, eta);
    CHECK(std::abs(got - expected) < 1e-14 * std::abs(expected));

    const cplx doubled = gamma4_stationary(1.1, 1.25, {2.0, 10.0}, edge, eta);
    CHECK_THAT(std::abs(doubled), WithinRel(2.0 * std::abs(gamma4_stationary(1.1, 1.25, kern, edge, eta)), 1e-14));
    CHECK(gamma4_stationary(1.1, 1.25, kern, edge, eta) == gamma4_stationary(1.25, 1.1, kern, edge, eta));
    CHECK(gamma4_stationary(1.1, 1.25, p, kern, eta) == gamma4_stationary(1.1, 1.25, kern, edge, eta));

    CHECK_THROWS_AS(gamma4_stationary(1.1, 1.2, {1.0, 0.0}, edge, eta), ZeroRange);
    CHECK_THROWS_AS(gamma4_stationary(0.9, 1.2, kern, edge, eta), BelowThreshold);
}

TEST_CASE("stationary Gaussian factor squeezes anti-correlations", "[vertex][property]") {
    const BandEdgeParams edge = band_edge_params({1.0, 0.5});
    auto factor = [&](double w1, double w2, double zeta) {
        const double d = saddle_momentum(w1, edge) - saddle_momentum(w2, edge);
        return std::exp(-zeta * d * d);
    };
    double previous = 2.0;
    for (int i = 0; i < 20; ++i) {
        const double f = factor(1.1, 1.1 + 0.02 * i, 10.0);
        CHECK(f <= previous);
        previous = f;
    }
    previous = 2.0;
    for (double zeta : {0.1, 0.5, 1.0, 5.0, 20.0}) {
        const double f = factor(1.1, 1.3, zeta);
        CHECK(f < previous);
        previous = f;
    }
}

TEST_CASE("stationary and direct vertices track each other above threshold", "[vertex]") {
    const SshParams p{1.0, 0.5};
    const double eta = 1e-2;
    const InteractionKernel kern{1.0, 10.0};
    const BandEdgeParams edge = band_edge_params(p);
    const DirectVertex direct(p, eta, kern, 512);
    double lo = INFINITY;
    double hi = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double w = edge.gap0 + 0.05 + 0.025 * i;
        const double ratio = std::abs(gamma4_stationary(w, w, kern, edge, eta)) / std::abs(direct(w, w));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    INFO("ratio range " << lo << " .. " << hi);
    CHECK(hi / lo < 2.0);
}
