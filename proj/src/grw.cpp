#include "collapsemap/grw.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace collapsemap::grw {

using sim::cplx;
using sim::GridState;
using sim::PacketState;
using std::numbers::pi;

std::vector<double> sample_collapse_times(double rate, double horizon, Rng& rng) {
    if (rate < 0.0) throw std::invalid_argument("sample_collapse_times: negative rate");
    std::vector<double> times;
    if (rate == 0.0) return times;
    double t = rng.exponential(rate);
    while (t < horizon) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
    return times;
}

double apply_collapse(PacketState& state, double sigma, Rng& rng) {
    double c = state.sample_center(sigma, rng);
    state.multiply_collapse(c, sigma);
    state.normalize();
    return c;
}

void apply_collapse_at(PacketState& state, double sigma, double center) {
    state.multiply_collapse(center, sigma);
    state.normalize();
}

namespace {
void check_grid_resolution(const GridState& state, double sigma) {
    if (state.spacing() > sigma / 8.0)
        throw std::invalid_argument("grid too coarse for sigma (need spacing <= sigma/8)");
}
} // namespace

std::vector<double> center_density(const GridState& state, double sigma) {
    check_grid_resolution(state, sigma);
    const int N = state.n();
    const double h = state.spacing();
    std::vector<double> w(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) w[static_cast<std::size_t>(i)] = std::norm(state.values()[static_cast<std::size_t>(i)]);
    auto kernel = sim::PeriodicKernel::gaussian(N, h, sigma);
    return kernel.convolve_real(w);  // rho(c_j) = sum_i h g(c_j - x_i) |psi_i|^2
}

double apply_collapse(GridState& state, double sigma, Rng& rng) {
    check_grid_resolution(state, sigma);
    // Draw a node from the |psi|^2 weights, then c = x_node + sigma * normal:
    // exactly the law rho(c) = sum_i h |psi_i|^2 g1(c - x_i).
    const int N = state.n();
    double total = 0.0;
    for (const auto& v : state.values()) total += std::norm(v);
    double pick = rng.uniform() * total;
    int node = N - 1;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        acc += std::norm(state.values()[static_cast<std::size_t>(i)]);
        if (pick < acc) {
            node = i;
            break;
        }
    }
    double c = state.x(node) + sigma * rng.normal();
    apply_collapse_at(state, sigma, c);
    return c;
}

void apply_collapse_at(GridState& state, double sigma, double center) {
    check_grid_resolution(state, sigma);
    for (int i = 0; i < state.n(); ++i) {
        double dx = state.x(i) - center;
        state.values()[static_cast<std::size_t>(i)] *= std::exp(-dx * dx / (4.0 * sigma * sigma));
    }
    state.normalize();
}

sim::PacketState compose_collapses(const PacketState& state, double sigma,
                                   const std::vector<double>& centers) {
    PacketState out = state;
    for (double c : centers) out.multiply_collapse(c, sigma);
    out.normalize();
    return out;
}

double mean_energy(const PacketState& state, double mass, double hbar) {
    return state.mean_p2(hbar) / (2.0 * mass);
}

double mean_energy(const GridState& state, double mass, double hbar) {
    return state.mean_p2(hbar) / (2.0 * mass);
}

namespace {

struct TrialRecord {
    int collapses = 0;
    double gain_sum = 0.0;    // sum of per-event energy jumps
    double energy_delta = 0.0;
    std::vector<CollapseEvent> events;
};

template <class StateT>
TrialRecord run_trial(const SimConfig& cfg, const StateT& initial, std::uint64_t trial,
                      bool keep_events) {
    Rng rng = Rng::for_trial(cfg.seed, trial);
    auto times = sample_collapse_times(cfg.lambda_eff, cfg.horizon, rng);
    StateT state = initial;
    TrialRecord rec;
    double t = 0.0;
    double e0 = mean_energy(state, cfg.mass, cfg.hbar);
    for (double T : times) {
        if (cfg.hamiltonian == sim::Hamiltonian::FreeParticle)
            state.evolve_free(T - t, cfg.mass, cfg.hbar);
        t = T;
        double before = mean_energy(state, cfg.mass, cfg.hbar);
        double c = apply_collapse(state, cfg.sigma, rng);
        double after = mean_energy(state, cfg.mass, cfg.hbar);
        rec.gain_sum += after - before;
        ++rec.collapses;
        if (keep_events) rec.events.push_back(CollapseEvent{T, 0, c});
    }
    if (cfg.hamiltonian == sim::Hamiltonian::FreeParticle)
        state.evolve_free(cfg.horizon - t, cfg.mass, cfg.hbar);
    rec.energy_delta = mean_energy(state, cfg.mass, cfg.hbar) - e0;
    return rec;
}

} // namespace

SimStats run_ensemble(const SimConfig& cfg, const State& initial, ExecMode mode,
                      std::vector<FlashRecord>* flash_log) {
    if (cfg.trials < 1) throw std::invalid_argument("run_ensemble: trials must be >= 1");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("run_ensemble: horizon must be > 0");
    if (std::holds_alternative<GridState>(initial))
        check_grid_resolution(std::get<GridState>(initial), cfg.sigma);

    const bool keep_events = flash_log != nullptr;
    std::vector<TrialRecord> recs(static_cast<std::size_t>(cfg.trials));
    auto body = [&](int i) {
        std::uint64_t trial = static_cast<std::uint64_t>(i);
        if (std::holds_alternative<PacketState>(initial))
            recs[static_cast<std::size_t>(i)] =
                run_trial(cfg, std::get<PacketState>(initial), trial, keep_events);
        else
            recs[static_cast<std::size_t>(i)] =
                run_trial(cfg, std::get<GridState>(initial), trial, keep_events);
    };
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.trials; ++i) body(i);
    } else {
        for (int i = 0; i < cfg.trials; ++i) body(i);
    }

    SimStats st;
    st.trials = cfg.trials;
    double gain_total = 0.0;
    for (const auto& r : recs) {
        st.collapses_total += r.collapses;
        gain_total += r.gain_sum;
    }
    st.mean_collapse_count = static_cast<double>(st.collapses_total) / cfg.trials;

    if (st.collapses_total > 0) {
        // ratio estimator R = sum(gains)/sum(counts); cluster-robust se
        double R = gain_total / static_cast<double>(st.collapses_total);
        st.mean_energy_gain_per_collapse = R;
        if (cfg.trials > 1) {
            double s2 = 0.0;
            for (const auto& r : recs) {
                double d = r.gain_sum - R * r.collapses;
                s2 += d * d;
            }
            s2 /= (cfg.trials - 1);
            st.stderr_gain = std::sqrt(s2 / cfg.trials) / st.mean_collapse_count;
        }
    }

    double rate_mean = 0.0;
    for (const auto& r : recs) rate_mean += r.energy_delta;
    rate_mean /= cfg.trials;
    st.energy_rate = rate_mean / cfg.horizon;
    if (cfg.trials > 1) {
        double s2 = 0.0;
        for (const auto& r : recs) s2 += (r.energy_delta - rate_mean) * (r.energy_delta - rate_mean);
        s2 /= (cfg.trials - 1);
        st.stderr_rate = std::sqrt(s2 / cfg.trials) / cfg.horizon;
    }

    if (flash_log) {
        flash_log->clear();
        for (int i = 0; i < cfg.trials; ++i)
            for (const auto& e : recs[static_cast<std::size_t>(i)].events)
                flash_log->push_back(FlashRecord{i, e.time, e.center});
    }
    return st;
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

} // namespace

RateFit decoherence_rate(const SimConfig& cfg, double separation, ExecMode mode) {
    if (separation < 0.0) throw std::invalid_argument("decoherence_rate: negative separation");
    const int K = 6;  // sample times, including t = 0
    const double width = cfg.sigma / 10.0;
    const double a = -separation / 2.0, b = separation / 2.0;
    PacketState initial = PacketState::two_peak(separation, width, cfg.hbar);

    std::vector<double> t_k(K + 1);
    for (int k = 0; k <= K; ++k) t_k[static_cast<std::size_t>(k)] = cfg.horizon * k / K;

    // per-trial probe products at each sample time
    std::vector<std::vector<cplx>> probes(static_cast<std::size_t>(cfg.trials),
                                          std::vector<cplx>(static_cast<std::size_t>(K + 1)));
    auto body = [&](int i) {
        Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
        auto times = sample_collapse_times(cfg.lambda_eff, cfg.horizon, rng);
        PacketState state = initial;
        std::size_t next_event = 0;
        for (int k = 0; k <= K; ++k) {
            while (next_event < times.size() && times[next_event] <= t_k[static_cast<std::size_t>(k)]) {
                apply_collapse(state, cfg.sigma, rng);
                ++next_event;
            }
            probes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                state.value(a) * std::conj(state.value(b));
        }
    };
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.trials; ++i) body(i);
    } else {
        for (int i = 0; i < cfg.trials; ++i) body(i);
    }

    // fit -d/dt log |E[probe]| on the full sample and on 10 trial groups
    const int G = 10;
    auto fit_group = [&](int g, int groups) {
        std::vector<double> logc;
        std::vector<double> ts;
        for (int k = 0; k <= K; ++k) {
            cplx mean = 0.0;
            long long count = 0;
            for (int i = 0; i < cfg.trials; ++i) {
                if (groups > 1 && i % groups != g) continue;
                mean += probes[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                ++count;
            }
            mean /= static_cast<double>(count);
            double mag = std::abs(mean);
            if (mag <= 0.0) continue;
            ts.push_back(t_k[static_cast<std::size_t>(k)]);
            logc.push_back(std::log(mag));
        }
        return -ls_slope(ts, logc);
    };

    RateFit fit;
    fit.rate = fit_group(0, 1);
    if (cfg.trials >= 2 * G) {
        std::vector<double> group_rates;
        for (int g = 0; g < G; ++g) group_rates.push_back(fit_group(g, G));
        double m = 0.0;
        for (double r : group_rates) m += r;
        m /= G;
        double s2 = 0.0;
        for (double r : group_rates) s2 += (r - m) * (r - m);
        fit.se = std::sqrt(s2 / (G - 1) / G);
    } else {
        fit.se = 0.0;
    }
    return fit;
}

std::vector<double> matter_density(const GridState& state, double mass, bool smeared,
                                   double sigma) {
    std::vector<double> density(static_cast<std::size_t>(state.n()));
    for (int i = 0; i < state.n(); ++i)
        density[static_cast<std::size_t>(i)] =
            mass * std::norm(state.values()[static_cast<std::size_t>(i)]);
    if (!smeared) return density;
    auto kernel = sim::PeriodicKernel::gaussian(state.n(), state.spacing(), sigma);
    return kernel.convolve_real(density);
}

double Grid2State::norm2() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * spacing * spacing;
}

void Grid2State::normalize() {
    double n2 = norm2();
    if (!(n2 > 1e-300)) throw std::runtime_error("Grid2State: normalization underflow");
    double f = 1.0 / std::sqrt(n2);
    for (auto& v : values) v *= f;
}

Grid2State Grid2State::symmetric_product(double origin, double spacing, int n, double c1,
                                         double c2, double width) {
    Grid2State s;
    s.origin = origin;
    s.spacing = spacing;
    s.n = n;
    s.values.resize(static_cast<std::size_t>(n) * n);
    auto phi = [&](double x, double c) { return std::exp(-(x - c) * (x - c) / (4.0 * width * width)); };
    for (int i1 = 0; i1 < n; ++i1) {
        double x1 = origin + i1 * spacing;
        for (int i2 = 0; i2 < n; ++i2) {
            double x2 = origin + i2 * spacing;
            // symmetrized two-particle product state
            s.values[static_cast<std::size_t>(i1) * n + i2] =
                phi(x1, c1) * phi(x2, c2) + phi(x1, c2) * phi(x2, c1);
        }
    }
    s.normalize();
    return s;
}

std::vector<double> pair_center_density(const Grid2State& state, double sigma) {
    const int n = state.n;
    const double h = state.spacing;
    // marginal |psi|^2 per particle, then one convolution each
    std::vector<double> m1(static_cast<std::size_t>(n), 0.0), m2(static_cast<std::size_t>(n), 0.0);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            double w = std::norm(state.values[static_cast<std::size_t>(i1) * n + i2]);
            m1[static_cast<std::size_t>(i1)] += w * h;
            m2[static_cast<std::size_t>(i2)] += w * h;
        }
    std::vector<double> rho(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double cj = state.origin + j * h;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double xi = state.origin + i * h;
            double g = std::exp(-(cj - xi) * (cj - xi) / (2.0 * sigma * sigma)) /
                       std::sqrt(2.0 * pi * sigma * sigma);
            acc += g * (m1[static_cast<std::size_t>(i)] + m2[static_cast<std::size_t>(i)]) * h;
        }
        rho[static_cast<std::size_t>(j)] = acc;
    }
    return rho;
}

double apply_collapse_pair(Grid2State& state, double sigma, Rng& rng) {
    auto rho = pair_center_density(state, sigma);
    double total = 0.0;
    for (double r : rho) total += r;
    double pick = rng.uniform() * total;
    int node = state.n - 1;
    double acc = 0.0;
    for (int j = 0; j < state.n; ++j) {
        acc += rho[static_cast<std::size_t>(j)];
        if (pick < acc) {
            node = j;
            break;
        }
    }
    double c = state.origin + node * state.spacing;
    for (int i1 = 0; i1 < state.n; ++i1) {
        double x1 = state.origin + i1 * state.spacing;
        for (int i2 = 0; i2 < state.n; ++i2) {
            double x2 = state.origin + i2 * state.spacing;
            double g1 = std::exp(-(c - x1) * (c - x1) / (2.0 * sigma * sigma));
            double g2 = std::exp(-(c - x2) * (c - x2) / (2.0 * sigma * sigma));
            double g = (g1 + g2) / std::sqrt(2.0 * pi * sigma * sigma);
            state.values[static_cast<std::size_t>(i1) * state.n + i2] *= std::sqrt(g);
        }
    }
    state.normalize();
    return c;
}

std::vector<double> matter_density_pair(const Grid2State& state, double m1, double m2) {
    const int n = state.n;
    const double h = state.spacing;
    std::vector<double> density(static_cast<std::size_t>(n), 0.0);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
            double w = std::norm(state.values[static_cast<std::size_t>(i1) * n + i2]);
            density[static_cast<std::size_t>(i1)] += m1 * w * h;
            density[static_cast<std::size_t>(i2)] += m2 * w * h;
        }
    return density;
}

} // namespace collapsemap::grw
