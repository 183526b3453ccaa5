#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "collapsemap/bounds.hpp"
#include "collapsemap/constants.hpp"
#include "collapsemap/types.hpp"

namespace collapsemap::catalog {

/// Printed Table-1 bounds, used verbatim for rows without a flight time and as
/// cross-check targets everywhere else.
struct PrintedBounds {
    double grw_lambda;  // s^-1
    double grw_ratio;   // m^-2 s^-1
    double csl_lambda;
    double csl_ratio;
};

/// One diffraction-experiment row: mass ratio m/m_p, time of flight tau,
/// grating period d.
struct DiffractionExperiment {
    int year = 0;
    std::string label;
    std::string reference;
    double mass_ratio = 0.0;
    std::optional<double> flight_time;  // s; absent for N/A rows
    double grating_period = 0.0;        // m
    std::optional<PrintedBounds> printed_bounds;
    bool proposed = false;
};

enum class SourceKind { XRay, IGMWarming, CaveWarming, Supercurrent, Diffraction, Sound };

/// Identifies which observation a constraint derives from; diffraction
/// constraints carry the experiment's year and label.
struct ConstraintSource {
    SourceKind kind;
    int year = 0;       // diffraction only
    std::string label;  // diffraction only

    std::string name() const;
    bool operator==(const ConstraintSource&) const = default;
};

struct Constraint {
    ConstraintSource source;
    std::optional<Theory> theory;  // nullopt: applies identically to both
    PiecewiseBound bound;
    Confidence confidence = Confidence::Solid;
    bool proposed = false;
};

/// Upper bounds lambda_k < 1/tau and lambda_k/sigma^2 < 1/(d^2 tau), folded
/// through the per-species rate scaling of the chosen theory. Rows without a
/// flight time pass the printed Table-1 bounds through unchanged.
struct DiffractionBoundPair {
    double lambda_max;  // s^-1
    double ratio_max;   // m^-2 s^-1
};
DiffractionBoundPair diffraction_bounds(const DiffractionExperiment& exp, Theory theory);

/// The two-branch exclusion bound of one experiment: a flat ceiling lambda_max
/// below the grating period d and ratio_max * sigma^2 above it; the branches
/// meet at sigma = d for rows derived from tau.
Constraint diffraction_constraint(const DiffractionExperiment& exp, Theory theory);

/// Average energy injected by one collapse on a free particle of the given
/// mass: 3 hbar^2 / (4 m sigma^2).
double collapse_energy(double mass, double sigma, const PhysicalConstants& consts);

/// Spontaneous warming rate of a gas of free particles, K/s:
/// hbar^2/(8 k_B m_p) * lambda/sigma^2, with an extra factor m/m_p in CSL.
double temperature_rate(Theory theory, const ParamPoint& pt, double mass_ratio,
                        const PhysicalConstants& consts);

/// Mean energy gain rate of N free particles, W:
/// (3 hbar^2/4)(N/m_p)(lambda/sigma^2), with an extra factor m/m_p in CSL.
double energy_rate(Theory theory, double n_particles, double mass_ratio, const ParamPoint& pt,
                   const PhysicalConstants& consts);

/// Cave-temperature bound: dT/dt < 3e-2 K/day, air as N2 (m = 28 m_p).
Constraint cave_warming_constraint(Theory theory, const PhysicalConstants& consts);

/// Intergalactic-medium warming bound, lambda/sigma^2 < 2e6 m^-2 s^-1 for both
/// theories. Uncertain (depends on the assessment of IGM cooling): Dashed.
Constraint igm_warming_constraint(Theory theory);

/// Spontaneous 11 keV x-ray emission from germanium: the pointwise minimum of
/// lambda < 1e26 sigma^4 and lambda < 1e7 sigma^2 (GRW) / 1e10 sigma^2 (CSL).
Constraint xray_constraint(Theory theory);

/// Audible spontaneous bangs: excluded for sigma < 1e-16 m, lambda > 1e-32 1/s.
/// Covered by the x-ray region; kept as an optional layer.
Constraint sound_constraint();

/// Supercurrent decay: lambda/sigma below 10 (GRW) / 2e4 (CSL) m^-1 s^-1 up to
/// sigma = 1e-3 m, lambda/sigma^3 above. Dashed (ignores Cooper-pair
/// re-creation).
Constraint supercurrent_constraint(Theory theory);

/// Parse experiment records from a ';'-delimited stream, one row per line:
///   year;label;reference;mass_ratio;tau_s;d_m;grw_lambda;grw_ratio;csl_lambda;csl_ratio;proposed
/// '#' starts a comment, tau_s may be the literal NA. Throws std::runtime_error
/// naming the line and field on malformed input.
std::vector<DiffractionExperiment> load_experiments(std::istream& in);

/// load_experiments on a file path, with the path prefixed to error messages.
std::vector<DiffractionExperiment> load_experiments_file(const std::string& path);

constexpr double air_mass_ratio = 28.0;  // N2, in units of m_p

} // namespace collapsemap::catalog
