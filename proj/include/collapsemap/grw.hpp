#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "collapsemap/constants.hpp"
#include "collapsemap/exec.hpp"
#include "collapsemap/grid.hpp"
#include "collapsemap/packet.hpp"
#include "collapsemap/rng.hpp"

namespace collapsemap::sim {
enum class Hamiltonian { Zero, FreeParticle };
}

namespace collapsemap::grw {

/// Parameters of one jump-process ensemble. lambda_eff is the per-particle
/// collapse rate lambda_k; species bookkeeping (the mass-proportional factor)
/// is the caller's job.
struct SimConfig {
    double sigma = 1e-7;
    double lambda_eff = 1.0;
    double horizon = 1.0;
    int trials = 1;
    std::uint64_t seed = 0;
    sim::Hamiltonian hamiltonian = sim::Hamiltonian::FreeParticle;
    double mass = 1.67262192369e-27;
    double hbar = 1.054571817e-34;
};

/// One collapse; under the flash ontology this is a flash at (time, center).
struct CollapseEvent {
    double time;
    int species;
    double center;
};

struct FlashRecord {
    int trial;
    double time;
    double center;
};

/// Poisson collapse times: strictly increasing, exponential gaps, within
/// [0, horizon).
std::vector<double> sample_collapse_times(double rate, double horizon, Rng& rng);

/// One collapse with the center drawn from rho(c) = integral |psi|^2 g1(c-x);
/// the state is multiplied by sqrt(g1(c-.)) and renormalized. Returns the
/// center. Throws on normalization underflow.
double apply_collapse(sim::PacketState& state, double sigma, Rng& rng);
double apply_collapse(sim::GridState& state, double sigma, Rng& rng);

/// Same with a fixed center (no sampling).
void apply_collapse_at(sim::PacketState& state, double sigma, double center);
void apply_collapse_at(sim::GridState& state, double sigma, double center);

/// n collapses of width sigma at the given centers, H = 0; equal (up to
/// normalization and global phase) to one collapse of width sigma/sqrt(n) at
/// the centers' mean.
sim::PacketState compose_collapses(const sim::PacketState& state, double sigma,
                                   const std::vector<double>& centers);

/// <p^2>/2m.
double mean_energy(const sim::PacketState& state, double mass, double hbar);
double mean_energy(const sim::GridState& state, double mass, double hbar);

/// Collapse-center density evaluated on the state's own grid nodes; its
/// discrete integral is 1 for a normalized single-particle state.
std::vector<double> center_density(const sim::GridState& state, double sigma);

using State = std::variant<sim::PacketState, sim::GridState>;

struct SimStats {
    int trials = 0;
    long long collapses_total = 0;
    double mean_energy_gain_per_collapse = 0.0;
    double stderr_gain = 0.0;
    double energy_rate = 0.0;  // W, ensemble mean of (E_final - E_0)/horizon
    double stderr_rate = 0.0;
    double mean_collapse_count = 0.0;
};

/// Monte Carlo ensemble of independent trials; trial i uses the substream
/// derived from (seed, i), so the result is identical in both execution modes
/// and for any thread count. Grid states must satisfy spacing <= sigma/8.
SimStats run_ensemble(const SimConfig& config, const State& initial,
                      ExecMode mode = ExecMode::Parallel,
                      std::vector<FlashRecord>* flash_log = nullptr);

struct RateFit {
    double rate;
    double se;
};

/// Decay rate of the ensemble-averaged coherence between two packets a
/// distance `separation` apart (pure collapse dynamics, H = 0). Fits an
/// exponential to E[psi(a) conj(psi(b))] at equally spaced sample times.
RateFit decoherence_rate(const SimConfig& config, double separation,
                         ExecMode mode = ExecMode::Parallel);

/// Matter density on the state's grid: mass * |psi|^2, optionally smeared
/// with the collapse Gaussian. Integrates to the particle's mass.
std::vector<double> matter_density(const sim::GridState& state, double mass, bool smeared,
                                   double sigma);

/// Two distinguishable-by-label but identical-species particles on an n-by-n
/// configuration grid; exercises the summed-Gaussian collapse of the
/// identical-particle model.
struct Grid2State {
    double origin = 0.0;
    double spacing = 1.0;
    int n = 0;
    std::vector<sim::cplx> values;  // row-major, index i1 * n + i2

    double norm2() const;
    void normalize();
    static Grid2State symmetric_product(double origin, double spacing, int n, double c1,
                                        double c2, double width);
};

/// rho(c) on the grid nodes for the pair state; integrates to the particle
/// count (2), the per-species total collapse rate bookkeeping of the model.
std::vector<double> pair_center_density(const Grid2State& state, double sigma);

/// Collapse of the pair state: multiply by sqrt(g(c-x1) + g(c-x2)), c drawn
/// from rho/2. Returns the center.
double apply_collapse_pair(Grid2State& state, double sigma, Rng& rng);

/// Matter density of the pair state: sum of the two position marginals times
/// the masses.
std::vector<double> matter_density_pair(const Grid2State& state, double m1, double m2);

} // namespace collapsemap::grw
