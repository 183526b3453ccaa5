#include "collapsemap/packet.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace collapsemap::sim {

using std::numbers::pi;

GaussMoments gauss_moments(cplx A, cplx B, cplx C) {
    // complete the square: A x^2 + B x = A (x + B/2A)^2 - B^2/4A
    cplx i0 = std::sqrt(pi / -A) * std::exp(C - B * B / (4.0 * A));
    cplx mean = -B / (2.0 * A);
    cplx var = -1.0 / (2.0 * A);  // second moment about `mean`
    return GaussMoments{i0, i0 * mean, i0 * (mean * mean + var)};
}

PacketState PacketState::single(double center, double width, double momentum, double hbar) {
    PacketState s;
    // |psi|^2 ~ N(center, width^2): alpha real part = -1/(4 width^2)
    cplx alpha(-1.0 / (4.0 * width * width), 0.0);
    cplx beta = -2.0 * alpha * center + cplx(0.0, momentum / hbar);
    cplx log_amp = alpha * center * center - 0.25 * std::log(2.0 * pi * width * width);
    s.terms_.push_back(GaussianTerm{alpha, beta, log_amp});
    s.normalize();
    return s;
}

PacketState PacketState::two_peak(double separation, double width, double hbar) {
    PacketState s;
    for (double c : {-separation / 2.0, separation / 2.0}) {
        auto p = single(c, width, 0.0, hbar);
        s.terms_.push_back(p.terms()[0]);
    }
    s.normalize();
    return s;
}

cplx PacketState::value(double x) const {
    cplx v = 0.0;
    for (const auto& t : terms_) v += std::exp(t.alpha * x * x + t.beta * x + t.log_amp);
    return v;
}

double PacketState::norm2() const {
    cplx total = 0.0;
    for (const auto& a : terms_)
        for (const auto& b : terms_) {
            total += gauss_moments(std::conj(a.alpha) + b.alpha, std::conj(a.beta) + b.beta,
                                   std::conj(a.log_amp) + b.log_amp)
                         .i0;
        }
    return total.real();
}

void PacketState::normalize() {
    double n2 = norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw std::runtime_error("PacketState: normalization underflow");
    double shift = -0.5 * std::log(n2);
    for (auto& t : terms_) t.log_amp += shift;
}

double PacketState::mean_x() const {
    cplx num = 0.0, den = 0.0;
    for (const auto& a : terms_)
        for (const auto& b : terms_) {
            auto m = gauss_moments(std::conj(a.alpha) + b.alpha, std::conj(a.beta) + b.beta,
                                   std::conj(a.log_amp) + b.log_amp);
            num += m.i1;
            den += m.i0;
        }
    return (num / den).real();
}

double PacketState::mean_p(double hbar) const {
    // <p> = -i hbar integral conj(psi) psi'
    cplx num = 0.0, den = 0.0;
    for (const auto& a : terms_)
        for (const auto& b : terms_) {
            auto m = gauss_moments(std::conj(a.alpha) + b.alpha, std::conj(a.beta) + b.beta,
                                   std::conj(a.log_amp) + b.log_amp);
            num += 2.0 * b.alpha * m.i1 + b.beta * m.i0;
            den += m.i0;
        }
    return (cplx(0.0, -hbar) * num / den).real();
}

double PacketState::mean_p2(double hbar) const {
    // <p^2> = hbar^2 integral |psi'|^2
    cplx num = 0.0, den = 0.0;
    for (const auto& a : terms_)
        for (const auto& b : terms_) {
            auto m = gauss_moments(std::conj(a.alpha) + b.alpha, std::conj(a.beta) + b.beta,
                                   std::conj(a.log_amp) + b.log_amp);
            cplx ca = std::conj(a.alpha), cb = std::conj(a.beta);
            num += 4.0 * ca * b.alpha * m.i2 + (2.0 * ca * b.beta + 2.0 * b.alpha * cb) * m.i1 +
                   cb * b.beta * m.i0;
            den += m.i0;
        }
    return hbar * hbar * (num / den).real();
}

void PacketState::multiply_collapse(double center, double sigma) {
    double q = 1.0 / (4.0 * sigma * sigma);
    for (auto& t : terms_) {
        t.alpha -= q;
        t.beta += 2.0 * q * center;
        t.log_amp -= q * center * center;
    }
}

void PacketState::evolve_free(double time, double mass, double hbar) {
    if (time == 0.0) return;
    cplx a(0.0, mass / (2.0 * hbar * time));
    for (auto& t : terms_) {
        cplx denom = t.alpha + a;
        cplx alpha_new = a * t.alpha / denom;
        cplx beta_new = a * t.beta / denom;
        t.log_amp += -t.beta * t.beta / (4.0 * denom) + 0.5 * std::log(a / denom);
        t.alpha = alpha_new;
        t.beta = beta_new;
    }
}

double PacketState::overlap_abs(const PacketState& a, const PacketState& b) {
    cplx total = 0.0;
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) {
            total += gauss_moments(std::conj(ta.alpha) + tb.alpha, std::conj(ta.beta) + tb.beta,
                                   std::conj(ta.log_amp) + tb.log_amp)
                         .i0;
        }
    return std::abs(total);
}

double PacketState::center_density(double c, double sigma) const {
    // g1(c-x) contributes -1/(2 sigma^2) x^2 + (c/sigma^2) x - c^2/(2 sigma^2)
    double s2 = sigma * sigma;
    cplx total = 0.0;
    for (const auto& a : terms_)
        for (const auto& b : terms_) {
            cplx A = std::conj(a.alpha) + b.alpha - 1.0 / (2.0 * s2);
            cplx B = std::conj(a.beta) + b.beta + c / s2;
            cplx C = std::conj(a.log_amp) + b.log_amp - c * c / (2.0 * s2) -
                     0.5 * std::log(2.0 * pi * s2);
            total += gauss_moments(A, B, C).i0;
        }
    return total.real();
}

double PacketState::sample_center(double sigma, Rng& rng) const {
    // Proposal: mixture of the diagonal terms' position laws convolved with
    // g1. Cauchy-Schwarz gives rho <= n * sum_i ||t_i||^2 N(mu_i, s_i^2+sigma^2).
    struct Comp {
        double weight, mean, sd;
    };
    std::vector<Comp> comps;
    double wsum = 0.0;
    for (const auto& t : terms_) {
        double s2 = -1.0 / (4.0 * t.alpha.real());  // position variance of |t_i|^2
        double mu = -t.beta.real() / (2.0 * t.alpha.real());
        auto m = gauss_moments(2.0 * t.alpha.real(), 2.0 * t.beta.real(),
                               2.0 * t.log_amp.real());
        double w = m.i0.real();  // ||t_i||^2
        comps.push_back(Comp{w, mu, std::sqrt(s2 + sigma * sigma)});
        wsum += w;
    }
    const double n = static_cast<double>(terms_.size());
    for (int attempt = 0; attempt < 100000; ++attempt) {
        double pick = rng.uniform() * wsum;
        std::size_t i = 0;
        for (; i + 1 < comps.size(); ++i) {
            if (pick < comps[i].weight) break;
            pick -= comps[i].weight;
        }
        double c = comps[i].mean + comps[i].sd * rng.normal();
        double q = 0.0;
        for (const auto& comp : comps) {
            double z = (c - comp.mean) / comp.sd;
            q += comp.weight * std::exp(-0.5 * z * z) / (comp.sd * std::sqrt(2.0 * pi));
        }
        double bound = n * q;
        double rho = center_density(c, sigma);
        if (rng.uniform() * bound <= rho) return c;
    }
    throw std::runtime_error("sample_center: rejection sampling failed to accept");
}

} // namespace collapsemap::sim
