#include "doctest.h"

#include <cmath>

#include "collapsemap/csl.hpp"
#include "test_util.hpp"

using namespace collapsemap;
using namespace collapsemap::csl;
using sim::GridState;

namespace {
constexpr double HBAR = 1.0;

CSLConfig natural_config() {
    CSLConfig cfg;
    cfg.sigma = 1.0;
    cfg.lambda_eff = 1.0;
    cfg.dt = 1e-2;
    cfg.horizon = 1.5;
    cfg.trials = 400;
    cfg.seed = 4242;
    cfg.scheme = Scheme::NormalizedNonlinear;
    cfg.hamiltonian = sim::Hamiltonian::Zero;
    cfg.mass = 1.0;
    cfg.hbar = HBAR;
    cfg.grid_n = 256;
    cfg.spacing = 1.0 / 8.0;
    cfg.origin = -16.0;
    return cfg;
}
} // namespace

TEST_CASE("smearing kernel is normalized on the grid") {
    auto cfg = natural_config();
    auto op = SmearingOperator::make(cfg);
    CHECK(std::abs(op.kernel.integral() - 1.0) < 1e-6);
    CHECK(testutil::rel_close(op.coupling,
                              cfg.lambda_eff * std::sqrt(4.0 * M_PI) * cfg.sigma, 1e-12));
}

TEST_CASE("em_step: stability and shape guards") {
    auto cfg = natural_config();
    auto op = SmearingOperator::make(cfg);
    GridState s = GridState::packet(cfg.origin, cfg.spacing, cfg.grid_n, 0.0, 0.5, 0.0, HBAR);
    std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n), 0.0);

    auto bad_dt = cfg;
    bad_dt.dt = 1.0;
    CHECK_THROWS_WITH_AS(em_step(s, bad_dt, op, noise), doctest::Contains("stability"),
                         std::invalid_argument);

    std::vector<double> short_noise(3, 0.0);
    CHECK_THROWS_AS(em_step(s, cfg, op, short_noise), std::invalid_argument);

    auto coarse = cfg;
    coarse.sigma = 0.5;
    CHECK_THROWS_WITH_AS(em_step(s, coarse, op, noise), doctest::Contains("too coarse"),
                         std::invalid_argument);
}

TEST_CASE("em_step: zero noise drift barely moves a point-like packet") {
    auto cfg = natural_config();
    auto op = SmearingOperator::make(cfg);
    // packet much narrower than sigma (but still grid-resolved)
    GridState s = GridState::packet(cfg.origin, cfg.spacing, cfg.grid_n, 0.0, 0.4, 0.0, HBAR);
    GridState before = s;
    std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n), 0.0);
    em_step(s, cfg, op, noise);
    CHECK(std::abs(s.norm2() - 1.0) < 1e-12);
    double fidelity = 0.0;
    {
        sim::cplx acc = 0.0;
        for (int i = 0; i < s.n(); ++i)
            acc += std::conj(before.values()[static_cast<std::size_t>(i)]) *
                   s.values()[static_cast<std::size_t>(i)];
        fidelity = std::abs(acc) * s.spacing();
    }
    CHECK(fidelity > 1.0 - 1e-6);
}

TEST_CASE("em_step: deterministic replay") {
    auto cfg = natural_config();
    cfg.trials = 1;
    auto op = SmearingOperator::make(cfg);
    auto run_once = [&]() {
        Rng rng = Rng::for_trial(cfg.seed, 0);
        GridState s =
            GridState::packet(cfg.origin, cfg.spacing, cfg.grid_n, 0.0, 0.5, 0.0, HBAR);
        std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n));
        for (int step = 0; step < 50; ++step) {
            for (auto& z : noise) z = std::sqrt(cfg.dt / cfg.spacing) * rng.normal();
            em_step(s, cfg, op, noise);
        }
        return s;
    };
    auto a = run_once();
    auto b = run_once();
    for (int i = 0; i < a.n(); ++i)
        CHECK(a.values()[static_cast<std::size_t>(i)] == b.values()[static_cast<std::size_t>(i)]);
}

TEST_CASE("linear unraveling: squared norm is a martingale") {
    auto cfg = natural_config();
    cfg.trials = 2000;
    cfg.horizon = 0.5;
    auto res = linear_norm_martingale(cfg);
    CHECK(std::abs(res.rate - 1.0) < 3.0 * res.se + 0.01);
}

TEST_CASE("analytic decoherence oracle matches the continuum formula") {
    auto cfg = natural_config();
    for (double ratio : {2.0, 10.0}) {
        double continuum = cfg.lambda_eff * (1.0 - std::exp(-ratio * ratio / 4.0));
        CHECK(testutil::rel_close(analytic_decoherence_rate(cfg, ratio * cfg.sigma), continuum,
                                  0.01));
    }
    CHECK(analytic_decoherence_rate(cfg, 0.0) == 0.0);
}

TEST_CASE("csl_decoherence_rate: separation 10 sigma decays at lambda_eff") {
    auto cfg = natural_config();
    cfg.trials = 600;
    cfg.horizon = 1.2;
    auto fit = csl_decoherence_rate(cfg, 10.0 * cfg.sigma);
    CHECK(std::abs(fit.rate - cfg.lambda_eff) < 0.15 * cfg.lambda_eff);

    auto zero = csl_decoherence_rate(cfg, 0.0);
    CHECK(std::abs(zero.rate) < 0.05 * cfg.lambda_eff);
}

TEST_CASE("csl_decoherence_rate: halving dt moves the fit by < 3%") {
    auto cfg = natural_config();
    cfg.trials = 600;
    cfg.horizon = 1.2;
    auto coarse = csl_decoherence_rate(cfg, 10.0 * cfg.sigma);
    auto half = cfg;
    half.dt /= 2.0;
    auto fine = csl_decoherence_rate(half, 10.0 * cfg.sigma);
    CHECK(std::abs(fine.rate - coarse.rate) <
          0.03 * cfg.lambda_eff + 3.0 * (coarse.se + fine.se));
}

TEST_CASE("csl_energy_rate matches hbar^2 lambda / (4 m sigma^2)") {
    auto cfg = natural_config();
    cfg.trials = 600;
    cfg.horizon = 1.0;
    cfg.hamiltonian = sim::Hamiltonian::FreeParticle;
    auto fit = csl_energy_rate(cfg);
    double expect = HBAR * HBAR * cfg.lambda_eff / (4.0 * cfg.mass * cfg.sigma * cfg.sigma);
    CHECK(testutil::rel_close(fit.rate, expect, 0.10));

    auto doubled = cfg;
    doubled.lambda_eff = 2.0;
    doubled.dt = 5e-3;
    auto fit2 = csl_energy_rate(doubled);
    CHECK(std::abs(fit2.rate - 2.0 * fit.rate) < 3.0 * (fit2.se + 2.0 * fit.se) + 0.05 * expect);
}

TEST_CASE("csl ensembles are schedule-independent") {
    auto cfg = natural_config();
    cfg.trials = 40;
    cfg.horizon = 0.3;
    auto a = csl_decoherence_rate(cfg, 10.0 * cfg.sigma, ExecMode::Serial);
    auto b = csl_decoherence_rate(cfg, 10.0 * cfg.sigma, ExecMode::Parallel);
    CHECK(a.rate == b.rate);
    CHECK(a.se == b.se);
}

TEST_CASE("lambda = 0 gives no energy growth") {
    auto cfg = natural_config();
    cfg.lambda_eff = 0.0;
    cfg.trials = 20;
    cfg.horizon = 0.5;
    cfg.hamiltonian = sim::Hamiltonian::FreeParticle;
    auto fit = csl_energy_rate(cfg);
    CHECK(std::abs(fit.rate) < 1e-12);
}

TEST_CASE("csl ensemble law is translation covariant (moment test)") {
    auto cfg = natural_config();
    cfg.trials = 150;
    cfg.horizon = 0.4;
    auto op = SmearingOperator::make(cfg);
    double shift = 2.0;
    auto mean_final_x = [&](double center) {
        double acc = 0.0;
        for (int i = 0; i < cfg.trials; ++i) {
            Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
            GridState s = GridState::packet(cfg.origin, cfg.spacing, cfg.grid_n, center, 0.5,
                                            0.0, HBAR);
            std::vector<double> noise(static_cast<std::size_t>(cfg.grid_n));
            for (int step = 0; step < 40; ++step) {
                for (auto& z : noise) z = std::sqrt(cfg.dt / cfg.spacing) * rng.normal();
                em_step(s, cfg, op, noise);
            }
            acc += s.mean_x();
        }
        return acc / cfg.trials;
    };
    double a = mean_final_x(0.0);
    double b = mean_final_x(shift);
    CHECK(std::abs(b - a - shift) < 0.15);  // collapse jitter ~ sigma/sqrt(trials)-scale
}
