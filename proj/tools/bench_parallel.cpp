// Benchmark: serial reference vs OpenMP for the three data-parallel kernels
// (jump-process ensemble, stochastic-equation ensemble, coverage grid).
// Also asserts that both modes produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "collapsemap/classify.hpp"
#include "collapsemap/csl.hpp"
#include "collapsemap/grw.hpp"

using namespace collapsemap;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <class F>
double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return ms_since(t0);
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-24s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::atoi(argv[1]) : 1;
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run the serial path\n");
#endif

    {
        grw::SimConfig cfg;
        cfg.sigma = 1.0;
        cfg.lambda_eff = 1.0;
        cfg.horizon = 5.0;
        cfg.trials = 20000 * scale;
        cfg.seed = 1;
        cfg.mass = 1.0;
        cfg.hbar = 1.0;
        auto initial = sim::PacketState::single(0.0, 0.5, 0.0, 1.0);
        grw::SimStats a, b;
        double ts = timed([&] { a = grw::run_ensemble(cfg, initial, ExecMode::Serial); });
        double tp = timed([&] { b = grw::run_ensemble(cfg, initial, ExecMode::Parallel); });
        report("grw ensemble", ts, tp,
               a.mean_energy_gain_per_collapse == b.mean_energy_gain_per_collapse &&
                   a.collapses_total == b.collapses_total);
    }

    {
        csl::CSLConfig cfg;
        cfg.sigma = 1.0;
        cfg.lambda_eff = 1.0;
        cfg.dt = 1e-2;
        cfg.horizon = 1.0;
        cfg.trials = 300 * scale;
        cfg.seed = 2;
        cfg.mass = 1.0;
        cfg.hbar = 1.0;
        cfg.grid_n = 256;
        cfg.spacing = 1.0 / 8.0;
        cfg.origin = -16.0;
        grw::RateFit a{}, b{};
        double ts = timed([&] { a = csl::csl_decoherence_rate(cfg, 10.0, ExecMode::Serial); });
        double tp = timed([&] { b = csl::csl_decoherence_rate(cfg, 10.0, ExecMode::Parallel); });
        report("csl ensemble", ts, tp, a.rate == b.rate && a.se == b.se);
    }

    {
        classify::ModelSpec spec;
        spec.layers = classify::LayerSet::all();
        auto exps = catalog::load_experiments_file(COLLAPSEMAP_DATA_DIR "/diffraction.tab");
        classify::Window w{1e-12, 1.0, 1e-36, 1e4};
        classify::CoverageResult a{}, b{};
        int n = 400 * scale;
        double ts = timed([&] { a = classify::coverage_check(spec, exps, w, n, ExecMode::Serial); });
        double tp = timed([&] { b = classify::coverage_check(spec, exps, w, n, ExecMode::Parallel); });
        bool same = a.covered == b.covered &&
                    (!a.witness || (a.witness->sigma == b.witness->sigma &&
                                    a.witness->lambda == b.witness->lambda));
        report("coverage grid", ts, tp, same);
    }
    return 0;
}
