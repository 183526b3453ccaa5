#pragma once

#include <complex>
#include <vector>

#include "collapsemap/rng.hpp"

namespace collapsemap::sim {

using cplx = std::complex<double>;

/// In-place radix-2 FFT; size must be a power of two. `inverse` applies 1/N.
void fft(std::vector<cplx>& a, bool inverse);

/// Single-particle wave function sampled on a uniform periodic grid,
/// x_j = origin + j * spacing. Norm convention: spacing * sum |psi|^2 = 1.
class GridState {
public:
    GridState() = default;
    GridState(double origin, double spacing, std::vector<cplx> values);

    /// Normalized Gaussian packet; grid size n must be a power of two.
    static GridState packet(double origin, double spacing, int n, double center, double width,
                            double momentum, double hbar);

    /// Equal-weight two-peak superposition at +-separation/2 around x=center.
    static GridState two_peak(double origin, double spacing, int n, double center,
                              double separation, double width, double hbar);

    int n() const { return static_cast<int>(values_.size()); }
    double spacing() const { return spacing_; }
    double origin() const { return origin_; }
    double x(int j) const { return origin_ + j * spacing_; }
    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }

    cplx value_at(double x) const;  // nearest-node lookup
    int nearest_node(double x) const;

    double norm2() const;
    void normalize();  // throws on underflow

    /// Exact free propagation by `time` under p^2/2m (Fourier space).
    void evolve_free(double time, double mass, double hbar);

    double mean_p2(double hbar) const;  // spectral
    double mean_x() const;

private:
    double origin_ = 0.0;
    double spacing_ = 1.0;
    std::vector<cplx> values_;
};

/// Periodic convolution helper with a fixed real kernel, via FFT. conv(f)_i =
/// spacing * sum_j kernel(x_i - x_j) f_j.
class PeriodicKernel {
public:
    /// kernel_fn(r) sampled at the periodic distances of an n-point grid.
    PeriodicKernel(int n, double spacing, double (*kernel_fn)(double, double), double param);

    /// Gaussian of width sigma, normalized in the continuum sense.
    static PeriodicKernel gaussian(int n, double spacing, double sigma);

    std::vector<double> convolve_real(const std::vector<double>& f) const;
    std::vector<cplx> convolve(const std::vector<cplx>& f) const;

    /// spacing * sum of kernel samples (the discrete integral).
    double integral() const { return integral_; }
    /// spacing * sum of squared kernel samples.
    double integral_sq() const { return integral_sq_; }
    const std::vector<double>& samples() const { return samples_; }

private:
    int n_;
    double spacing_;
    std::vector<double> samples_;
    std::vector<cplx> fft_;
    double integral_;
    double integral_sq_;
};

} // namespace collapsemap::sim
