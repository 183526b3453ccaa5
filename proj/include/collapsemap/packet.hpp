#pragma once

#include <complex>
#include <vector>

#include "collapsemap/rng.hpp"

namespace collapsemap::sim {

using cplx = std::complex<double>;

/// One complex-Gaussian term exp(alpha x^2 + beta x + log_amp), Re(alpha) < 0.
/// Collapse multiplication and free evolution are closed on this family.
struct GaussianTerm {
    cplx alpha;
    cplx beta;
    cplx log_amp;
};

/// Integrals of exp(A x^2 + B x + C) times 1, x, x^2 over the real line.
struct GaussMoments {
    cplx i0, i1, i2;
};
GaussMoments gauss_moments(cplx A, cplx B, cplx C);

/// A wave function that is a finite superposition of Gaussian packets.
/// All operations are exact up to floating point; nothing here touches a grid.
class PacketState {
public:
    PacketState() = default;

    /// Normalized packet with position spread `width` (standard deviation of
    /// |psi|^2), mean position `center` and mean momentum `momentum`.
    static PacketState single(double center, double width, double momentum, double hbar);

    /// Equal-weight symmetric superposition of two packets at +-separation/2.
    static PacketState two_peak(double separation, double width, double hbar);

    const std::vector<GaussianTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    cplx value(double x) const;
    double norm2() const;
    void normalize();

    double mean_x() const;
    double mean_p(double hbar) const;
    double mean_p2(double hbar) const;

    /// Multiply by exp(-(x-center)^2 / (4 sigma^2)) (one collapse, fixed
    /// center), without renormalizing.
    void multiply_collapse(double center, double sigma);

    /// Exact free evolution by `time` under p^2/2m.
    void evolve_free(double time, double mass, double hbar);

    /// |<a|b>| for normalized states.
    static double overlap_abs(const PacketState& a, const PacketState& b);

    /// Collapse-center density rho(c) = integral g1(c-x) |psi(x)|^2 dx with g1
    /// the normalized Gaussian of width sigma; closed form, state need not be
    /// normalized (scales with norm^2).
    double center_density(double c, double sigma) const;

    /// Draw a collapse center from rho(c) by rejection against the
    /// diagonal-term mixture. Exact for any packet count.
    double sample_center(double sigma, Rng& rng) const;

private:
    std::vector<GaussianTerm> terms_;
};

} // namespace collapsemap::sim
