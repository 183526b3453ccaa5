#pragma once

#include <stdexcept>
#include <string>

namespace collapsemap {

enum class Theory { GRW, CSL };

/// Primitive ontology: flashes, the matter density function, or the
/// matter density with the delta kernel replaced by the collapse Gaussian.
enum class Ontology { Flash, MatterDensity, MatterDensitySmeared };

enum class Confidence { Solid, Dashed };

/// A point of the parameter plane: collapse width sigma [m], rate lambda [1/s].
struct ParamPoint {
    double sigma;
    double lambda;

    ParamPoint(double s, double l) : sigma(s), lambda(l) {
        if (!(s > 0.0) || !(l > 0.0))
            throw std::invalid_argument("ParamPoint: sigma and lambda must be positive");
    }
};

/// Per-species rate scaling: lambda_k = (m_k/m_p) lambda in GRW,
/// (m_k/m_p)^2 lambda in CSL.
inline double mass_scaling(Theory theory, double mass_ratio) {
    return theory == Theory::GRW ? mass_ratio : mass_ratio * mass_ratio;
}

inline std::string theory_name(Theory t) { return t == Theory::GRW ? "grw" : "csl"; }

inline std::string ontology_name(Ontology o) {
    switch (o) {
        case Ontology::Flash: return "flash";
        case Ontology::MatterDensity: return "matter";
        case Ontology::MatterDensitySmeared: return "smeared";
    }
    return "?";
}

} // namespace collapsemap
