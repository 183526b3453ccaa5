#include "collapsemap/csl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace collapsemap::csl {

using sim::cplx;
using sim::GridState;
using std::numbers::pi;

namespace {

void validate(const CSLConfig& cfg) {
    if (cfg.dt * cfg.lambda_eff > 1e-2 + 1e-15)
        throw std::invalid_argument("csl: dt * lambda_eff exceeds the stability bound 1e-2");
    if (cfg.spacing > cfg.sigma / 8.0)
        throw std::invalid_argument("csl: grid too coarse for sigma (need spacing <= sigma/8)");
    if (cfg.grid_n <= 0 || (cfg.grid_n & (cfg.grid_n - 1)) != 0)
        throw std::invalid_argument("csl: grid_n must be a power of two");
    if (cfg.trials < 1) throw std::invalid_argument("csl: trials must be >= 1");
}

std::vector<double> density_of(const GridState& s) {
    std::vector<double> d(static_cast<std::size_t>(s.n()));
    for (int i = 0; i < s.n(); ++i)
        d[static_cast<std::size_t>(i)] = std::norm(s.values()[static_cast<std::size_t>(i)]);
    return d;
}

} // namespace

SmearingOperator SmearingOperator::make(const CSLConfig& cfg) {
    return SmearingOperator{
        sim::PeriodicKernel::gaussian(cfg.grid_n, cfg.spacing, cfg.sigma),
        cfg.lambda_eff * std::sqrt(4.0 * pi * cfg.sigma * cfg.sigma),
    };
}

void em_step(GridState& state, const CSLConfig& cfg, const SmearingOperator& op,
             const std::vector<double>& noise) {
    validate(cfg);
    if (static_cast<int>(noise.size()) != state.n())
        throw std::invalid_argument("em_step: noise size mismatch");

    if (cfg.hamiltonian == sim::Hamiltonian::FreeParticle)
        state.evolve_free(cfg.dt, cfg.mass, cfg.hbar);

    const int N = state.n();
    const double h = state.spacing();
    const double gamma = op.coupling;
    const double sq = std::sqrt(gamma);
    const double S0 = op.kernel.integral_sq();  // integral g^2 (flat part of the drift)

    // noise field smeared by g
    auto F = op.kernel.convolve_real(noise);

    if (cfg.scheme == Scheme::LinearUnraveling) {
        for (int i = 0; i < N; ++i) {
            auto& v = state.values()[static_cast<std::size_t>(i)];
            v *= 1.0 + sq * F[static_cast<std::size_t>(i)] - 0.5 * gamma * S0 * cfg.dt;
        }
        return;
    }

    // nonlinear scheme: subtract <N(x)> = (g * |psi|^2)(x)
    auto q = op.kernel.convolve_real(density_of(state));
    auto gq = op.kernel.convolve_real(q);
    double Q = 0.0, nbar = 0.0;
    for (int j = 0; j < N; ++j) {
        Q += q[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(j)] * h;
        nbar += q[static_cast<std::size_t>(j)] * noise[static_cast<std::size_t>(j)] * h;
    }
    for (int i = 0; i < N; ++i) {
        double drift = S0 - 2.0 * gq[static_cast<std::size_t>(i)] + Q;
        auto& v = state.values()[static_cast<std::size_t>(i)];
        v *= 1.0 + sq * (F[static_cast<std::size_t>(i)] - nbar) - 0.5 * gamma * drift * cfg.dt;
    }
    state.normalize();
}

double analytic_decoherence_rate(const CSLConfig& cfg, double separation) {
    // gamma * [(g*g)(0) - (g*g)(separation)] on the actual grid
    auto kernel = sim::PeriodicKernel::gaussian(cfg.grid_n, cfg.spacing, cfg.sigma);
    auto conv = kernel.convolve_real(kernel.samples());
    double at0 = conv[0];
    int sep_nodes = static_cast<int>(std::lround(separation / cfg.spacing));
    sep_nodes = ((sep_nodes % cfg.grid_n) + cfg.grid_n) % cfg.grid_n;
    double at_sep = conv[static_cast<std::size_t>(sep_nodes)];
    double gamma = cfg.lambda_eff * std::sqrt(4.0 * pi * cfg.sigma * cfg.sigma);
    return gamma * (at0 - at_sep);
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Runs trials collecting one sample vector per trial; merges in trial order.
template <class PerTrial>
void run_trials(const CSLConfig& cfg, ExecMode mode, PerTrial&& body) {
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.trials; ++i) body(i);
    } else {
        for (int i = 0; i < cfg.trials; ++i) body(i);
    }
}

grw::RateFit fit_from_groups(const std::vector<double>& t,
                             const std::vector<std::vector<double>>& per_group_logs,
                             const std::vector<double>& full_log) {
    grw::RateFit fit;
    fit.rate = -ls_slope(t, full_log);
    const int G = static_cast<int>(per_group_logs.size());
    if (G >= 2) {
        double m = 0.0;
        std::vector<double> rates;
        for (const auto& y : per_group_logs) rates.push_back(-ls_slope(t, y));
        for (double r : rates) m += r;
        m /= G;
        double s2 = 0.0;
        for (double r : rates) s2 += (r - m) * (r - m);
        fit.se = std::sqrt(s2 / (G - 1) / G);
    } else {
        fit.se = 0.0;
    }
    return fit;
}

} // namespace

grw::RateFit csl_decoherence_rate(const CSLConfig& cfg, double separation, ExecMode mode) {
    validate(cfg);
    const int K = 6;
    const double width = cfg.sigma / 2.0;
    const double center = cfg.origin + 0.5 * cfg.grid_n * cfg.spacing;
    GridState initial = GridState::two_peak(cfg.origin, cfg.spacing, cfg.grid_n, center,
                                            separation, width, cfg.hbar);
    const int a = initial.nearest_node(center - separation / 2.0);
    const int b = initial.nearest_node(center + separation / 2.0);

    const long long total_steps = std::llround(cfg.horizon / cfg.dt);
    const long long per_block = std::max<long long>(1, total_steps / K);

    std::vector<double> t_k;
    for (int k = 0; k <= K; ++k) t_k.push_back(static_cast<double>(std::min(per_block * k, total_steps)) * cfg.dt);

    std::vector<std::vector<cplx>> probes(static_cast<std::size_t>(cfg.trials),
                                          std::vector<cplx>(static_cast<std::size_t>(K + 1)));
    auto op = SmearingOperator::make(cfg);
    run_trials(cfg, mode, [&](int i) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
        GridState state = initial;
        std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n));
        const double noise_sd = std::sqrt(cfg.dt / cfg.spacing);
        long long step = 0;
        for (int k = 0; k <= K; ++k) {
            long long target = std::min(per_block * k, total_steps);
            for (; step < target; ++step) {
                for (auto& z : noise) z = noise_sd * rng.normal();
                em_step(state, cfg, op, noise);
            }
            probes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                state.values()[static_cast<std::size_t>(a)] *
                std::conj(state.values()[static_cast<std::size_t>(b)]);
        }
    });

    const int G = cfg.trials >= 20 ? 10 : 1;
    std::vector<std::vector<double>> group_logs(static_cast<std::size_t>(G));
    std::vector<double> full_log;
    std::vector<double> ts;
    for (int k = 0; k <= K; ++k) {
        cplx mean = 0.0;
        for (int i = 0; i < cfg.trials; ++i)
            mean += probes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        mean /= static_cast<double>(cfg.trials);
        ts.push_back(t_k[static_cast<std::size_t>(k)]);
        full_log.push_back(std::log(std::abs(mean)));
        for (int g = 0; g < G; ++g) {
            cplx gm = 0.0;
            long long cnt = 0;
            for (int i = g; i < cfg.trials; i += G) {
                gm += probes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                ++cnt;
            }
            group_logs[static_cast<std::size_t>(g)].push_back(
                std::log(std::abs(gm / static_cast<double>(cnt))));
        }
    }
    return fit_from_groups(ts, G >= 2 ? group_logs : std::vector<std::vector<double>>{}, full_log);
}

grw::RateFit csl_energy_rate(const CSLConfig& cfg, ExecMode mode) {
    validate(cfg);
    const int K = 5;
    const double width = cfg.sigma / 2.0;
    const double center = cfg.origin + 0.5 * cfg.grid_n * cfg.spacing;
    GridState initial =
        GridState::packet(cfg.origin, cfg.spacing, cfg.grid_n, center, width, 0.0, cfg.hbar);

    const long long total_steps = std::llround(cfg.horizon / cfg.dt);
    const long long per_block = std::max<long long>(1, total_steps / K);

    std::vector<std::vector<double>> energies(static_cast<std::size_t>(cfg.trials),
                                              std::vector<double>(static_cast<std::size_t>(K + 1)));
    auto op = SmearingOperator::make(cfg);
    run_trials(cfg, mode, [&](int i) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
        GridState state = initial;
        std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n));
        const double noise_sd = std::sqrt(cfg.dt / cfg.spacing);
        long long step = 0;
        for (int k = 0; k <= K; ++k) {
            long long target = std::min(per_block * k, total_steps);
            for (; step < target; ++step) {
                for (auto& z : noise) z = noise_sd * rng.normal();
                em_step(state, cfg, op, noise);
            }
            energies[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                grw::mean_energy(state, cfg.mass, cfg.hbar);
        }
    });

    const int G = cfg.trials >= 20 ? 10 : 1;
    std::vector<double> ts;
    std::vector<double> full_mean;
    std::vector<std::vector<double>> group_means(static_cast<std::size_t>(G));
    for (int k = 0; k <= K; ++k) {
        ts.push_back(static_cast<double>(std::min(per_block * k, total_steps)) * cfg.dt);
        double mean = 0.0;
        for (int i = 0; i < cfg.trials; ++i)
            mean += energies[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        full_mean.push_back(mean / cfg.trials);
        for (int g = 0; g < G; ++g) {
            double gm = 0.0;
            long long cnt = 0;
            for (int i = g; i < cfg.trials; i += G) {
                gm += energies[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                ++cnt;
            }
            group_means[static_cast<std::size_t>(g)].push_back(gm / static_cast<double>(cnt));
        }
    }

    grw::RateFit fit;
    fit.rate = ls_slope(ts, full_mean);
    if (G >= 2) {
        std::vector<double> rates;
        for (const auto& y : group_means) rates.push_back(ls_slope(ts, y));
        double m = 0.0;
        for (double r : rates) m += r;
        m /= G;
        double s2 = 0.0;
        for (double r : rates) s2 += (r - m) * (r - m);
        fit.se = std::sqrt(s2 / (G - 1) / G);
    } else {
        fit.se = 0.0;
    }
    return fit;
}

grw::RateFit linear_norm_martingale(const CSLConfig& cfg, ExecMode mode) {
    CSLConfig lin = cfg;
    lin.scheme = Scheme::LinearUnraveling;
    validate(lin);
    const double width = lin.sigma / 2.0;
    const double center = lin.origin + 0.5 * lin.grid_n * lin.spacing;
    GridState initial =
        GridState::packet(lin.origin, lin.spacing, lin.grid_n, center, width, 0.0, lin.hbar);
    const long long total_steps = std::llround(lin.horizon / lin.dt);

    std::vector<double> norms(static_cast<std::size_t>(lin.trials));
    auto op = SmearingOperator::make(lin);
    run_trials(lin, mode, [&](int i) {
        Rng rng = Rng::for_trial(lin.seed, static_cast<std::uint64_t>(i));
        GridState state = initial;
        std::vector<double> noise(static_cast<std::size_t>(lin.grid_n));
        const double noise_sd = std::sqrt(lin.dt / lin.spacing);
        for (long long s = 0; s < total_steps; ++s) {
            for (auto& z : noise) z = noise_sd * rng.normal();
            em_step(state, lin, op, noise);
        }
        norms[static_cast<std::size_t>(i)] = state.norm2();
    });

    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= lin.trials;
    double s2 = 0.0;
    for (double v : norms) s2 += (v - mean) * (v - mean);
    double se = lin.trials > 1 ? std::sqrt(s2 / (lin.trials - 1) / lin.trials) : 0.0;
    return grw::RateFit{mean, se};
}

} // namespace collapsemap::csl
