#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapsemap/catalog.hpp"
#include "collapsemap/exec.hpp"
#include "collapsemap/pur.hpp"
#include "collapsemap/types.hpp"

namespace collapsemap::classify {

/// Which constraint families contribute to the empirically refuted region.
/// The uncertain layers (IGM, supercurrent) and the covered sound layer are
/// off by default, mirroring the main-figure convention.
struct LayerSet {
    bool diffraction = true;
    bool xray = true;
    bool cave_warming = true;
    bool igm_warming = false;
    bool supercurrent = false;
    bool sound = false;

    static LayerSet all() { return {true, true, true, true, true, true}; }
};

struct ModelSpec {
    Theory theory = Theory::GRW;
    Ontology ontology = Ontology::MatterDensity;
    LayerSet layers;
    std::optional<int> year_max;  // keep only diffraction rows up to this year
    bool include_proposed = false;
    pur::AdequacyThresholds thresholds;
    pur::InkGeometry geometry;
};

/// Throws std::invalid_argument on inconsistent specs (flash ontology outside
/// GRW, smeared ontology outside GRW, year_max before the first experiment).
void validate(const ModelSpec& spec);

enum class Status { Acceptable, Refuted, Unsatisfactory, Both };

struct Classification {
    std::vector<catalog::ConstraintSource> refuted_by;
    bool unsatisfactory = false;

    Status status() const {
        if (refuted_by.empty()) return unsatisfactory ? Status::Unsatisfactory : Status::Acceptable;
        return unsatisfactory ? Status::Both : Status::Refuted;
    }
};

std::string status_name(Status s);

/// All constraints active under the spec, in deterministic order (source kind,
/// then year, then label). Proposed experiments are included only when
/// requested and stay flagged; they never count as refutation.
std::vector<catalog::Constraint> build_constraints(
    const ModelSpec& spec, const std::vector<catalog::DiffractionExperiment>& experiments);

/// The PUR predicate selected by (theory, ontology).
bool unsatisfactory_at(const ModelSpec& spec, const ParamPoint& pt);

Classification classify_point(const ModelSpec& spec, const ParamPoint& pt,
                              const std::vector<catalog::DiffractionExperiment>& experiments);

/// Same, against a pre-built constraint list (grid evaluation).
Classification classify_point(const ModelSpec& spec,
                              const std::vector<catalog::Constraint>& constraints,
                              const ParamPoint& pt);

struct SigmaRange {
    double lo;
    double hi;
};

/// Vertices of the ERR boundary (lower envelope of the active non-proposed
/// bounds) in (log10 sigma, log10 lambda), restricted to the window, plus the
/// winning constraint per span.
struct BoundarySpan {
    double u_lo;
    double u_hi;
    catalog::ConstraintSource source;
};
struct Boundary {
    std::vector<std::pair<double, double>> vertices;
    std::vector<BoundarySpan> spans;
    PiecewiseBound envelope;
};
Boundary err_boundary(const ModelSpec& spec,
                      const std::vector<catalog::DiffractionExperiment>& experiments,
                      const SigmaRange& window);

/// Lower envelope of the diffraction layer alone under a year filter; the
/// region-V outline of the year-growth figure.
PiecewiseBound diffraction_envelope(const std::vector<catalog::DiffractionExperiment>& experiments,
                                    Theory theory, std::optional<int> year_max,
                                    bool include_proposed);

struct Window {
    double sigma_lo;
    double sigma_hi;
    double lambda_lo;
    double lambda_hi;
};

struct CoverageResult {
    bool covered;
    std::optional<ParamPoint> witness;  // an Acceptable grid point when not covered
    int grid_n;
};

/// Does ERR + PUR cover the whole window? Sampled on an n-by-n log grid
/// (endpoints included). The witness is the first Acceptable grid point in
/// row-major order, identical in both execution modes.
CoverageResult coverage_check(const ModelSpec& spec,
                              const std::vector<catalog::DiffractionExperiment>& experiments,
                              const Window& window, int grid_n = 200,
                              ExecMode mode = ExecMode::Parallel);

} // namespace collapsemap::classify
