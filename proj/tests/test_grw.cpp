#include "doctest.h"

#include <cmath>
#include <algorithm>
#include <numeric>

#include "collapsemap/grw.hpp"
#include "test_util.hpp"

using namespace collapsemap;
using namespace collapsemap::grw;
using sim::GridState;
using sim::PacketState;

namespace {
constexpr double HBAR = 1.0;

SimConfig natural_config() {
    SimConfig cfg;
    cfg.sigma = 1.0;
    cfg.lambda_eff = 1.0;
    cfg.horizon = 5.0;
    cfg.trials = 10000;
    cfg.seed = 42;
    cfg.hamiltonian = sim::Hamiltonian::FreeParticle;
    cfg.mass = 1.0;
    cfg.hbar = HBAR;
    return cfg;
}
} // namespace

TEST_CASE("sample_collapse_times: Poisson statistics") {
    Rng rng(1);
    CHECK(sample_collapse_times(0.0, 10.0, rng).empty());

    double rate = 10.0, horizon = 10.0;  // rate * horizon = 100
    int trials = 10000;
    long long total = 0;
    for (int i = 0; i < trials; ++i) {
        Rng r = Rng::for_trial(7, static_cast<std::uint64_t>(i));
        auto times = sample_collapse_times(rate, horizon, r);
        for (std::size_t k = 1; k < times.size(); ++k) CHECK(times[k] > times[k - 1]);
        if (!times.empty()) {
            CHECK(times.front() >= 0.0);
            CHECK(times.back() < horizon);
        }
        total += static_cast<long long>(times.size());
    }
    double mean = static_cast<double>(total) / trials;
    CHECK(std::abs(mean - 100.0) < 3.0 * std::sqrt(100.0) / std::sqrt(trials) + 0.05);
}

TEST_CASE("sample_collapse_times: seeded determinism") {
    Rng a(9), b(9), c(10);
    auto ta = sample_collapse_times(2.0, 50.0, a);
    auto tb = sample_collapse_times(2.0, 50.0, b);
    auto tc = sample_collapse_times(2.0, 50.0, c);
    CHECK(ta == tb);
    CHECK(ta != tc);
}

TEST_CASE("apply_collapse: infinitely mild collapse leaves the state intact") {
    auto s = PacketState::single(0.0, 1.0, 0.0, HBAR);
    auto before = s;
    Rng rng(3);
    apply_collapse(s, 1e6, rng);
    CHECK(PacketState::overlap_abs(before, s) > 1.0 - 1e-6);
}

TEST_CASE("apply_collapse: a wide superposition collapses to one peak") {
    double sigma = 1.0;
    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        auto s = PacketState::two_peak(10.0 * sigma, sigma / 10.0, HBAR);
        apply_collapse(s, sigma, rng);
        // norm share on either side of the midpoint, by closed-form moments of
        // the collapsed two-term state: use |psi|^2 integrated numerically
        double left = 0.0, right = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            double x = -8.0 + i * (16.0 / 4000);
            double w = std::norm(s.value(x)) * (16.0 / 4000);
            (x < 0 ? left : right) += w;
        }
        double dominant = std::max(left, right) / (left + right);
        CHECK(dominant > 0.999);
    }
}

TEST_CASE("compose_collapses equals one collapse of width sigma/sqrt(n)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uc(-2.0, 2.0);
    double sigma = 1.3;
    for (int n : {1, 2, 4, 16}) {
        auto initial = PacketState::single(0.4, 0.9, 0.7, HBAR);
        std::vector<double> centers;
        for (int k = 0; k < n; ++k) centers.push_back(uc(rng));
        double mean_c = std::accumulate(centers.begin(), centers.end(), 0.0) / n;

        auto composed = compose_collapses(initial, sigma, centers);
        auto direct = initial;
        apply_collapse_at(direct, sigma / std::sqrt(static_cast<double>(n)), mean_c);

        REQUIRE(composed.terms().size() == 1);
        REQUIRE(direct.terms().size() == 1);
        CHECK(testutil::rel_close(composed.terms()[0].alpha.real(),
                                  direct.terms()[0].alpha.real(), 1e-10));
        CHECK(std::abs(composed.terms()[0].alpha.imag() - direct.terms()[0].alpha.imag()) <
              1e-10);
        CHECK(testutil::rel_close(composed.terms()[0].beta.real(), direct.terms()[0].beta.real(),
                                  1e-10));
        CHECK(PacketState::overlap_abs(composed, direct) > 1.0 - 1e-10);
    }
}

TEST_CASE("compose_collapses is order-independent") {
    auto initial = PacketState::single(0.0, 1.0, 0.0, HBAR);
    std::vector<double> centers{-1.0, 0.3, 2.0};
    auto a = compose_collapses(initial, 1.0, centers);
    auto b = compose_collapses(initial, 1.0, {2.0, -1.0, 0.3});
    CHECK(PacketState::overlap_abs(a, b) > 1.0 - 1e-12);
}

TEST_CASE("repeated collapses drive the width toward the sigma scale") {
    auto s = PacketState::single(0.0, 5.0, 0.0, HBAR);
    double sigma = 1.0;
    int n = 16;
    for (int k = 0; k < n; ++k) {
        s.multiply_collapse(0.0, sigma);
        s.normalize();
    }
    // after n collapses: 1/w'^2 = 1/w^2 + n/sigma^2 >= n/sigma^2
    double var = -1.0 / (4.0 * s.terms()[0].alpha.real());
    double floor = 1.0 / (1.0 / 25.0 + n);
    CHECK(testutil::rel_close(var, floor, 1e-9));
    CHECK(var >= sigma * sigma / n * 0.9);
}

TEST_CASE("mean_energy: packet closed forms and grid agreement") {
    double m = 1.0, w = 0.5;
    auto s = PacketState::single(0.0, w, 0.0, HBAR);
    CHECK(testutil::rel_close(mean_energy(s, m, HBAR), HBAR * HBAR / (8 * m * w * w), 1e-12));

    auto boosted = PacketState::single(0.0, w, 2.0, HBAR);
    CHECK(testutil::rel_close(mean_energy(boosted, m, HBAR),
                              HBAR * HBAR / (8 * m * w * w) + 4.0 / (2 * m), 1e-12));

    auto g = GridState::packet(-16.0, 32.0 / 1024, 1024, 0.0, w, 2.0, HBAR);
    CHECK(testutil::rel_close(mean_energy(g, m, HBAR), mean_energy(boosted, m, HBAR), 1e-6));
}

TEST_CASE("run_ensemble: lambda = 0 gives no collapses and no energy gain") {
    auto cfg = natural_config();
    cfg.lambda_eff = 0.0;
    cfg.trials = 10;
    auto st = run_ensemble(cfg, PacketState::single(0.0, 0.5, 0.0, HBAR));
    CHECK(st.collapses_total == 0);
    CHECK(st.mean_energy_gain_per_collapse == 0.0);
    CHECK(st.energy_rate == 0.0);
}

TEST_CASE("run_ensemble: per-collapse energy gain matches the Gaussian oracle") {
    auto cfg = natural_config();
    auto st = run_ensemble(cfg, PacketState::single(0.0, 0.5, 0.0, HBAR));
    double oracle = HBAR * HBAR / (8.0 * cfg.mass * cfg.sigma * cfg.sigma);
    CHECK(testutil::rel_close(st.mean_energy_gain_per_collapse, oracle, 0.05));

    // Wald identity: rate = gain per collapse * lambda_eff within MC error
    double wald = st.mean_energy_gain_per_collapse * cfg.lambda_eff;
    CHECK(std::abs(st.energy_rate - wald) <
          3.0 * (st.stderr_rate + cfg.lambda_eff * st.stderr_gain) + 1e-12);
}

TEST_CASE("run_ensemble: deterministic, schedule-independent, flash logs align") {
    auto cfg = natural_config();
    cfg.trials = 200;
    auto initial = PacketState::single(0.0, 0.5, 0.0, HBAR);
    std::vector<FlashRecord> log_a, log_b;
    auto a = run_ensemble(cfg, initial, ExecMode::Serial, &log_a);
    auto b = run_ensemble(cfg, initial, ExecMode::Parallel, &log_b);
    CHECK(a.collapses_total == b.collapses_total);
    CHECK(a.mean_energy_gain_per_collapse == b.mean_energy_gain_per_collapse);
    CHECK(a.energy_rate == b.energy_rate);
    REQUIRE(log_a.size() == log_b.size());
    for (std::size_t i = 0; i < log_a.size(); ++i) {
        CHECK(log_a[i].trial == log_b[i].trial);
        CHECK(log_a[i].time == log_b[i].time);
        CHECK(log_a[i].center == log_b[i].center);
    }
    for (std::size_t i = 1; i < log_a.size(); ++i) {
        if (log_a[i].trial == log_a[i - 1].trial) CHECK(log_a[i].time > log_a[i - 1].time);
    }
}

TEST_CASE("run_ensemble: translation covariance of the flash distribution") {
    auto cfg = natural_config();
    cfg.trials = 2000;
    double shift = 3.0;
    std::vector<FlashRecord> log_a, log_b;
    run_ensemble(cfg, PacketState::single(0.0, 0.5, 0.0, HBAR), ExecMode::Parallel, &log_a);
    run_ensemble(cfg, PacketState::single(shift, 0.5, 0.0, HBAR), ExecMode::Parallel, &log_b);
    REQUIRE(log_a.size() == log_b.size());  // same seed, same collapse times
    double ma = 0.0, mb = 0.0;
    for (const auto& f : log_a) ma += f.center;
    for (const auto& f : log_b) mb += f.center;
    ma /= static_cast<double>(log_a.size());
    mb /= static_cast<double>(log_b.size());
    CHECK(std::abs(mb - ma - shift) < 0.1);
}

TEST_CASE("run_ensemble: grid carrier agrees with packets on the energy gain") {
    auto cfg = natural_config();
    cfg.trials = 300;
    cfg.horizon = 2.0;
    auto grid = GridState::packet(-16.0, 1.0 / 8.0, 256, 0.0, 0.5, 0.0, HBAR);
    auto st = run_ensemble(cfg, grid);
    double oracle = HBAR * HBAR / (8.0 * cfg.mass * cfg.sigma * cfg.sigma);
    CHECK(testutil::rel_close(st.mean_energy_gain_per_collapse, oracle, 0.1));
}

TEST_CASE("run_ensemble: grid too coarse for sigma is an error") {
    auto cfg = natural_config();
    cfg.sigma = 0.5;  // spacing 1/8 > sigma/8
    auto grid = GridState::packet(-16.0, 1.0 / 8.0, 256, 0.0, 0.5, 0.0, HBAR);
    CHECK_THROWS_WITH_AS(run_ensemble(cfg, grid), doctest::Contains("too coarse"),
                         std::invalid_argument);
}

TEST_CASE("norm preservation across operations") {
    Rng rng(12);
    auto s = PacketState::two_peak(4.0, 0.7, HBAR);
    for (int i = 0; i < 5; ++i) {
        apply_collapse(s, 1.2, rng);
        s.evolve_free(0.3, 1.0, HBAR);
        CHECK(std::abs(s.norm2() - 1.0) < 1e-9);
    }
    auto g = GridState::two_peak(-16.0, 1.0 / 8.0, 256, 0.0, 4.0, 0.7, HBAR);
    for (int i = 0; i < 5; ++i) {
        apply_collapse(g, 1.2, rng);
        g.evolve_free(0.3, 1.0, HBAR);
        CHECK(std::abs(g.norm2() - 1.0) < 1e-9);
    }
}

TEST_CASE("center_density on randomized grid states integrates to 1") {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 512;
        double h = 1.0 / 8.0;
        std::vector<sim::cplx> v(static_cast<std::size_t>(n));
        // random smooth state: a few random packets with random phases
        for (int p = 0; p < 3; ++p) {
            double c = (rng.uniform() - 0.5) * 20.0;
            double w = 0.3 + rng.uniform() * 2.0;
            double k = (rng.uniform() - 0.5) * 4.0;
            double amp = 0.2 + rng.uniform();
            for (int i = 0; i < n; ++i) {
                double x = -32.0 + i * h;
                v[static_cast<std::size_t>(i)] +=
                    amp * std::exp(sim::cplx(-(x - c) * (x - c) / (4 * w * w), k * x));
            }
        }
        GridState s(-32.0, h, v);
        s.normalize();
        auto rho = center_density(s, 1.0);
        double total = 0.0;
        for (double r : rho) total += r * h;
        CHECK(std::abs(total - 1.0) < 1e-6);
    }
}

TEST_CASE("decoherence_rate matches lambda (1 - exp(-sep^2/8 sigma^2))") {
    auto cfg = natural_config();
    cfg.trials = 20000;
    for (double ratio : {0.0, 2.0, 10.0}) {
        double expect = cfg.lambda_eff * (1.0 - std::exp(-ratio * ratio / 8.0));
        cfg.horizon = expect > 0.1 ? 2.0 / expect : 2.0;
        auto fit = decoherence_rate(cfg, ratio * cfg.sigma);
        CHECK(std::abs(fit.rate - expect) < 0.05 * cfg.lambda_eff);
    }
}

TEST_CASE("matter_density integrates to the mass and sees both peaks") {
    double m = 1.67e-27;
    auto g = GridState::two_peak(-16.0, 1.0 / 8.0, 256, 0.0, 8.0, 0.5, HBAR);
    auto density = matter_density(g, m, false, 1.0);
    double total = 0.0;
    for (double d : density) total += d * g.spacing();
    CHECK(testutil::rel_close(total, m, 1e-9));

    double left = 0.0, right = 0.0;
    for (int i = 0; i < g.n(); ++i)
        (g.x(i) < 0 ? left : right) += density[static_cast<std::size_t>(i)] * g.spacing();
    CHECK(testutil::rel_close(left, right, 1e-6));
    CHECK(left > 0.4 * m);
}

TEST_CASE("smeared matter density equals the discrete convolution oracle") {
    auto g = GridState::two_peak(-16.0, 1.0 / 8.0, 256, 0.0, 4.0, 0.5, HBAR);
    double sigma = 1.0, m = 2.0;
    auto smeared = matter_density(g, m, true, sigma);
    auto plain = matter_density(g, m, false, sigma);
    // direct O(N^2) periodic convolution with the normalized Gaussian
    int n = g.n();
    double h = g.spacing();
    double peak = *std::max_element(smeared.begin(), smeared.end());
    for (int i = 0; i < n; i += 17) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            int d = std::abs(i - j);
            d = std::min(d, n - d);
            double r = d * h;
            acc += plain[static_cast<std::size_t>(j)] *
                   std::exp(-r * r / (2 * sigma * sigma)) /
                   std::sqrt(2 * M_PI * sigma * sigma) * h;
        }
        CHECK(std::abs(smeared[static_cast<std::size_t>(i)] - acc) < 1e-6 * peak);
    }
}

TEST_CASE("two-particle collapse: symmetrized operator, particle-count density") {
    double sigma = 1.0;
    auto pair = Grid2State::symmetric_product(-8.0, 1.0 / 8.0, 128, -2.0, 2.0, 0.4);
    CHECK(std::abs(pair.norm2() - 1.0) < 1e-9);

    auto rho = pair_center_density(pair, sigma);
    double total = 0.0;
    for (double r : rho) total += r * pair.spacing;
    CHECK(std::abs(total - 2.0) < 1e-6);  // integrates to the particle count

    Rng rng(21);
    double c = apply_collapse_pair(pair, sigma, rng);
    CHECK(std::abs(pair.norm2() - 1.0) < 1e-9);
    CHECK(std::isfinite(c));
    // symmetry preserved
    for (int i1 = 0; i1 < pair.n; i1 += 13)
        for (int i2 = 0; i2 < pair.n; i2 += 13) {
            auto a = pair.values[static_cast<std::size_t>(i1) * pair.n + i2];
            auto b = pair.values[static_cast<std::size_t>(i2) * pair.n + i1];
            CHECK(std::abs(a - b) < 1e-12);
        }

    auto density = matter_density_pair(pair, 1.0, 1.0);
    double mass_total = 0.0;
    for (double d : density) mass_total += d * pair.spacing;
    CHECK(testutil::rel_close(mass_total, 2.0, 1e-9));
}
