#include "collapsemap/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace collapsemap::sim {

using std::numbers::pi;

void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& v : a) v /= static_cast<double>(n);
    }
}

GridState::GridState(double origin, double spacing, std::vector<cplx> values)
    : origin_(origin), spacing_(spacing), values_(std::move(values)) {
    if (!(spacing > 0.0)) throw std::invalid_argument("GridState: spacing must be positive");
}

GridState GridState::packet(double origin, double spacing, int n, double center, double width,
                            double momentum, double hbar) {
    if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("GridState::packet: n must be a power of two");
    std::vector<cplx> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double x = origin + j * spacing;
        double dx = x - center;
        v[static_cast<std::size_t>(j)] =
            std::exp(cplx(-dx * dx / (4.0 * width * width), momentum * dx / hbar));
    }
    GridState s(origin, spacing, std::move(v));
    s.normalize();
    return s;
}

GridState GridState::two_peak(double origin, double spacing, int n, double center,
                              double separation, double width, double hbar) {
    auto a = packet(origin, spacing, n, center - separation / 2.0, width, 0.0, hbar);
    auto b = packet(origin, spacing, n, center + separation / 2.0, width, 0.0, hbar);
    std::vector<cplx> v(a.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] + b.values()[i];
    GridState s(origin, spacing, std::move(v));
    s.normalize();
    return s;
}

int GridState::nearest_node(double x) const {
    int j = static_cast<int>(std::lround((x - origin_) / spacing_));
    if (j < 0) j = 0;
    if (j >= n()) j = n() - 1;
    return j;
}

cplx GridState::value_at(double x) const { return values_[static_cast<std::size_t>(nearest_node(x))]; }

double GridState::norm2() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return s * spacing_;
}

void GridState::normalize() {
    double n2 = norm2();
    if (!(n2 > 1e-300) || !std::isfinite(n2))
        throw std::runtime_error("GridState: normalization underflow");
    double f = 1.0 / std::sqrt(n2);
    for (auto& v : values_) v *= f;
}

void GridState::evolve_free(double time, double mass, double hbar) {
    if (time == 0.0) return;
    fft(values_, false);
    const int N = n();
    for (int j = 0; j < N; ++j) {
        int jw = j < N / 2 ? j : j - N;
        double k = 2.0 * pi * jw / (N * spacing_);
        double phase = -hbar * k * k * time / (2.0 * mass);
        values_[static_cast<std::size_t>(j)] *= cplx(std::cos(phase), std::sin(phase));
    }
    fft(values_, true);
}

double GridState::mean_p2(double hbar) const {
    std::vector<cplx> f = values_;
    fft(f, false);
    const int N = n();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
        int jw = j < N / 2 ? j : j - N;
        double k = 2.0 * pi * jw / (N * spacing_);
        double w = std::norm(f[static_cast<std::size_t>(j)]);
        num += hbar * k * hbar * k * w;
        den += w;
    }
    return num / den;
}

double GridState::mean_x() const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n(); ++j) {
        double w = std::norm(values_[static_cast<std::size_t>(j)]);
        num += x(j) * w;
        den += w;
    }
    return num / den;
}

PeriodicKernel::PeriodicKernel(int n, double spacing, double (*kernel_fn)(double, double),
                               double param)
    : n_(n), spacing_(spacing), samples_(static_cast<std::size_t>(n)) {
    for (int j = 0; j < n; ++j) {
        // periodic distance: j or n - j cells, whichever is closer
        int jw = j <= n / 2 ? j : n - j;
        samples_[static_cast<std::size_t>(j)] = kernel_fn(jw * spacing, param);
    }
    integral_ = 0.0;
    integral_sq_ = 0.0;
    fft_.assign(samples_.begin(), samples_.end());
    for (double v : samples_) {
        integral_ += v * spacing;
        integral_sq_ += v * v * spacing;
    }
    fft(fft_, false);
}

namespace {
double gaussian_kernel(double r, double sigma) {
    return std::exp(-r * r / (2.0 * sigma * sigma)) / std::sqrt(2.0 * pi * sigma * sigma);
}
} // namespace

PeriodicKernel PeriodicKernel::gaussian(int n, double spacing, double sigma) {
    return PeriodicKernel(n, spacing, gaussian_kernel, sigma);
}

std::vector<cplx> PeriodicKernel::convolve(const std::vector<cplx>& f) const {
    if (static_cast<int>(f.size()) != n_)
        throw std::invalid_argument("PeriodicKernel::convolve: size mismatch");
    std::vector<cplx> work = f;
    fft(work, false);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= fft_[i];
    fft(work, true);
    for (auto& v : work) v *= spacing_;
    return work;
}

std::vector<double> PeriodicKernel::convolve_real(const std::vector<double>& f) const {
    std::vector<cplx> c(f.begin(), f.end());
    auto out = convolve(c);
    std::vector<double> r(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) r[i] = out[i].real();
    return r;
}

} // namespace collapsemap::sim
