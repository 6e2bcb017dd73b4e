#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "cavssh/keldysh.hpp"

using namespace cavssh;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Mid-band cavity with strong coupling: the bath linewidth −Im Σ ≈ 0.24 dwarfs η ≤ 1e-3.
const SshParams kModel{1.0, 0.5};
constexpr std::size_t kNk = 65536;

CavityParams bath_dominated(double eta) { return {2.0, 0.5, 2.0, eta}; }

double peak_frequency(const CavityParams& c, double q) {
    const PolarizationBubble bubble(kModel, c.eta, kNk);
    const FrequencyGrid grid{1.0, 3.0, 2001};
    std::size_t best = 0;
    double best_a = -1.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double a =
            spectral_from_green(dressed_propagator_from_sigma(grid[i], q, c, photon_self_energy(bubble, grid[i], c)));
        if (a > best_a) {
            best_a = a;
            best = i;
        }
    }
    return grid[best];
}

}  // namespace

TEST_CASE("Bose occupation", "[keldysh]") {
    CHECK(bose_occupation(1.0, {0.0}) == 0.0);
    CHECK_THAT(bose_occupation(std::log(2.0), {1.0}), WithinAbs(1.0, 1e-14));
    for (double x : {1e-3, 5e-3, 9.9e-3}) {
        const double t = 2.0;
        CHECK_THAT(bose_occupation(x * t, {t}), WithinRel(1.0 / x, 0.01));
    }
    CHECK_THROWS_AS(bose_occupation(0.0, {1.0}), NonPositiveFrequency);
    CHECK_THROWS_AS(bose_occupation(-1.0, {1.0}), NonPositiveFrequency);
    CHECK_THROWS_AS(bose_occupation(1.0, {-1.0}), InvalidParameter);
}

TEST_CASE("Keldysh self-energy", "[keldysh]") {
    const CavityParams c{1.0, 0.5, 0.05, 0.01};
    const SshParams p{1.0, 1.5};
    for (double w : {0.5, 1.2, 2.0, 4.0}) {
        const cplx sr = photon_self_energy(w, p, c);
        const cplx zero_t = keldysh_self_energy(w, p, c, {0.0});
        CHECK(zero_t == cplx{0.0, -2.0 * sr.imag()});
        const ThermalState th{0.7};
        const cplx sk = keldysh_self_energy(w, p, c, th);
        CHECK(sk.real() == 0.0);
        CHECK(sk.imag() >= 0.0);
        CHECK_THAT(sk.imag() / (-2.0 * sr.imag()), WithinRel(1.0 + 2.0 * bose_occupation(w, th), 1e-14));
    }
    const CavityParams free{1.0, 0.5, 0.0, 0.01};
    CHECK(std::abs(keldysh_self_energy(1.2, p, free, {0.5})) == 0.0);
}

TEST_CASE("Keldysh Green function structure", "[keldysh][property]") {
    const CavityParams c{1.0, 0.5, 0.05, 0.01};
    const SshParams p{1.0, 1.5};
    const ThermalState th{0.4};
    for (int i = 1; i <= 60; ++i) {
        const double w = 0.07 * i;
        const cplx gk = keldysh_green(w, 0.1, p, c, th);
        CHECK(std::abs(gk.real()) <= 1e-12 * std::abs(gk));
        CHECK(gk.imag() >= 0.0);
        const cplx gr = dressed_propagator(w, 0.1, p, c);
        CHECK(std::abs(advanced_propagator(w, 0.1, p, c) - std::conj(gr)) <= 1e-15 * std::abs(gr));
    }
    const CavityParams free{1.0, 0.5, 0.0, 0.01};
    CHECK(std::abs(keldysh_green(1.0, 0.0, p, free, th)) == 0.0);
}

TEST_CASE("Keldysh and Feshbach spectral functions are identical", "[keldysh]") {
    const CavityParams c{1.0, 0.5, 0.05, 0.01};
    for (double t2 : {0.5, 1.5}) {
        for (int i = 0; i < 80; ++i) {
            const double w = 0.05 * i;
            for (double q : {0.0, 0.3, -0.7}) {
                CHECK(keldysh_spectral_function(w, q, {1.0, t2}, c) == spectral_function(w, q, {1.0, t2}, c));
            }
        }
    }
}

TEST_CASE("|G^K| peaks where A peaks", "[keldysh]") {
    // Narrow mid-band line (width ≈ 0.016) still dominated by the bath (−Im Σ ≈ 15η).
    const CavityParams c{2.0, 0.5, 0.5, 1e-3};
    const SshParams p = kModel;
    const ThermalState th{2.0};
    const FrequencyGrid grid{1.95, 2.05, 201};
    std::size_t best_a = 0;
    std::size_t best_k = 0;
    double max_a = -1.0;
    double max_k = -1.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double a = spectral_function(grid[i], 0.0, p, c, 16384);
        const double k = std::abs(keldysh_green(grid[i], 0.0, p, c, th, 16384));
        if (a > max_a) {
            max_a = a;
            best_a = i;
        }
        if (k > max_k) {
            max_k = k;
            best_k = i;
        }
    }
    CHECK((best_a > best_k ? best_a - best_k : best_k - best_a) <= 1);
}

TEST_CASE("equilibrium FDT at the resonance", "[keldysh]") {
    const CavityParams c = bath_dominated(1e-3);
    const ThermalState th{2.0};
    const double w = peak_frequency(c, 0.0);
    const cplx gk = keldysh_green(w, 0.0, kModel, c, th, kNk);
    const cplx gr = dressed_propagator(w, 0.0, kModel, c, kNk);
    const double fdt = -2.0 * gr.imag() * (1.0 + 2.0 * bose_occupation(w, th));
    CHECK_THAT(gk.imag(), WithinRel(fdt, 0.01));
}

TEST_CASE("equilibrium occupation recovers Bose-Einstein", "[keldysh]") {
    const ThermalState th{2.0};
    const CavityParams c = bath_dominated(1e-3);
    const double w = peak_frequency(c, 0.0);
    CHECK_THAT(occupation(w, 0.0, kModel, c, th, kNk), WithinRel(bose_occupation(w, th), 0.01));
}

TEST_CASE("occupation error shrinks with eta", "[keldysh]") {
    const ThermalState th{2.0};
    double previous = INFINITY;
    for (double eta : {1e-2, 1e-3, 1e-4}) {
        const CavityParams c = bath_dominated(eta);
        const double w = peak_frequency(c, 0.0);
        const double err = std::abs(occupation(w, 0.0, kModel, c, th, kNk) - bose_occupation(w, th));
        INFO("eta = " << eta << " error = " << err);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("zero-temperature occupation vanishes", "[keldysh]") {
    for (double eta : {1e-2, 1e-3}) {
        const CavityParams c = bath_dominated(eta);
        const double w = peak_frequency(c, 0.0);
        CHECK(std::abs(occupation(w, 0.0, kModel, c, {0.0}, kNk)) < 1e-10);
    }
    const CavityParams weak{1.0, 0.5, 0.05, 0.01};
    for (double w : {0.9, 1.0, 1.1}) CHECK(std::abs(occupation(w, 0.0, {1.0, 1.5}, weak, {0.0})) < 1e-10);
}

TEST_CASE("equilibrium occupation is independent of q", "[keldysh][property]") {
    const ThermalState th{1.3};
    const CavityParams c = bath_dominated(1e-3);
    for (double w : {1.5, 2.0, 2.6}) {
        const double n0 = occupation(w, 0.0, kModel, c, th, 8192);
        for (double q : {0.2, 0.5, 1.0}) CHECK_THAT(occupation(w, q, kModel, c, th, 8192), WithinRel(n0, 1e-12));
    }
}
