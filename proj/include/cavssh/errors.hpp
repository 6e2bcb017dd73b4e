#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cavssh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Δ(k) vanished where a finite gap is required.
class GaplessPoint : public Error {
public:
    using Error::Error;
};

/// t2/t1 too close to 1 for a quantity that diverges or is ill-defined there.
class CriticalPoint : public Error {
public:
    using Error::Error;
};

class NonFiniteSample : public Error {
public:
    using Error::Error;
};

class NonFiniteEntry : public Error {
public:
    using Error::Error;
};

class DegenerateDesign : public Error {
public:
    using Error::Error;
};

class PoleOnBoundary : public Error {
public:
    using Error::Error;
};

class NonPositiveFrequency : public Error {
public:
    using Error::Error;
};

class ZeroSpectralWeight : public Error {
public:
    using Error::Error;
};

class ZeroRange : public Error {
public:
    using Error::Error;
};

class GridTooNarrow : public Error {
public:
    using Error::Error;
};

class ZeroNorm : public Error {
public:
    using Error::Error;
};

/// Newton iteration ran out of steps. Keeps the last iterate for diagnostics.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, std::complex<double> last, double residual, int iterations)
        : Error(what), last_iterate_(last), residual_(residual), iterations_(iterations) {}

    [[nodiscard]] std::complex<double> last_iterate() const noexcept { return last_iterate_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    std::complex<double> last_iterate_;
    double residual_;
    int iterations_;
};

/// A photon frequency sits below the pair-creation threshold Δ0.
/// which() is 1 or 2 for the offending frequency, 3 when both are below.
class BelowThreshold : public Error {
public:
    BelowThreshold(const std::string& what, int which) : Error(what), which_(which) {}
    [[nodiscard]] int which() const noexcept { return which_; }

private:
    int which_;
};

}  // namespace cavssh
