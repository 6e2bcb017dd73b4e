#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cavssh/errors.hpp"

namespace cavssh {

/// Uniform samples start, ..., stop (both ends included).
struct FrequencyGrid {
    double start = 0.0;
    double stop = 1.0;
    std::size_t count = 2;

    void validate() const {
        if (!std::isfinite(start) || !std::isfinite(stop)) throw InvalidParameter("grid bounds must be finite");
        if (!(stop > start)) throw InvalidParameter("grid needs stop > start");
        if (count < 2) throw InvalidParameter("grid needs at least 2 points");
    }

    [[nodiscard]] double spacing() const noexcept { return (stop - start) / static_cast<double>(count - 1); }

    [[nodiscard]] double operator[](std::size_t i) const noexcept {
        if (i + 1 == count) return stop;
        return start + spacing() * static_cast<double>(i);
    }

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = (*this)[i];
        return v;
    }
};

/// Complex samples on a frequency grid (self-energies, propagators).
struct ComplexSpectrum {
    FrequencyGrid grid;
    std::vector<std::complex<double>> samples;

    void validate() const {
        grid.validate();
        if (samples.size() != grid.count) throw InvalidParameter("spectrum sample count does not match its grid");
        for (const auto& z : samples) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw NonFiniteSample("spectrum holds a non-finite sample");
            }
        }
    }
};

template <class F>
ComplexSpectrum sample_spectrum(const FrequencyGrid& grid, F&& f) {
    grid.validate();
    ComplexSpectrum out{grid, {}};
    out.samples.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) out.samples.push_back(f(grid[i]));
    return out;
}

}  // namespace cavssh
