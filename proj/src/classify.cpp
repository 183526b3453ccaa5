#include "collapsemap/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace collapsemap::classify {

using catalog::Constraint;
using catalog::ConstraintSource;
using catalog::DiffractionExperiment;
using catalog::SourceKind;

void validate(const ModelSpec& spec) {
    if (spec.ontology == Ontology::Flash && spec.theory != Theory::GRW)
        throw std::invalid_argument("flash ontology requires GRW");
    if (spec.ontology == Ontology::MatterDensitySmeared && spec.theory != Theory::GRW)
        throw std::invalid_argument("smeared matter density is defined for GRW only");
    if (spec.year_max && *spec.year_max < 1927)
        throw std::invalid_argument("year_max predates the first experiment (1927)");
}

std::string status_name(Status s) {
    switch (s) {
        case Status::Acceptable: return "acceptable";
        case Status::Refuted: return "refuted";
        case Status::Unsatisfactory: return "unsatisfactory";
        case Status::Both: return "both";
    }
    return "?";
}

std::vector<Constraint> build_constraints(const ModelSpec& spec,
                                          const std::vector<DiffractionExperiment>& experiments) {
    validate(spec);
    const auto consts = codata2018();
    std::vector<Constraint> out;
    if (spec.layers.xray) out.push_back(catalog::xray_constraint(spec.theory));
    if (spec.layers.igm_warming) out.push_back(catalog::igm_warming_constraint(spec.theory));
    if (spec.layers.cave_warming)
        out.push_back(catalog::cave_warming_constraint(spec.theory, consts));
    if (spec.layers.supercurrent) out.push_back(catalog::supercurrent_constraint(spec.theory));
    if (spec.layers.diffraction) {
        std::vector<const DiffractionExperiment*> picked;
        for (const auto& exp : experiments) {
            if (exp.proposed && !spec.include_proposed) continue;
            if (spec.year_max && exp.year > *spec.year_max) continue;
            picked.push_back(&exp);
        }
        std::sort(picked.begin(), picked.end(),
                  [](const DiffractionExperiment* a, const DiffractionExperiment* b) {
                      if (a->year != b->year) return a->year < b->year;
                      return a->label < b->label;
                  });
        for (const auto* exp : picked)
            out.push_back(catalog::diffraction_constraint(*exp, spec.theory));
    }
    if (spec.layers.sound) out.push_back(catalog::sound_constraint());
    return out;
}

bool unsatisfactory_at(const ModelSpec& spec, const ParamPoint& pt) {
    if (spec.theory == Theory::GRW) {
        switch (spec.ontology) {
            case Ontology::Flash: return pur::grwf_pur(pt, spec.thresholds, spec.geometry);
            case Ontology::MatterDensity:
                return pur::grwm_pur(pt, spec.thresholds, spec.geometry);
            case Ontology::MatterDensitySmeared:
                return pur::grwm_smeared_pur(pt, spec.thresholds, spec.geometry);
        }
    }
    return pur::cslm_pur(pt, spec.thresholds, spec.geometry);
}

Classification classify_point(const ModelSpec& spec, const std::vector<Constraint>& constraints,
                              const ParamPoint& pt) {
    Classification c;
    for (const auto& k : constraints) {
        if (k.proposed) continue;
        if (is_excluded(k.bound, pt)) c.refuted_by.push_back(k.source);
    }
    c.unsatisfactory = unsatisfactory_at(spec, pt);
    return c;
}

Classification classify_point(const ModelSpec& spec, const ParamPoint& pt,
                              const std::vector<DiffractionExperiment>& experiments) {
    return classify_point(spec, build_constraints(spec, experiments), pt);
}

Boundary err_boundary(const ModelSpec& spec,
                      const std::vector<DiffractionExperiment>& experiments,
                      const SigmaRange& window) {
    if (!(window.lo > 0.0) || !(window.lo < window.hi))
        throw std::invalid_argument("err_boundary: bad sigma window");
    auto constraints = build_constraints(spec, experiments);
    std::vector<PiecewiseBound> bounds;
    std::vector<const Constraint*> owners;
    for (const auto& k : constraints) {
        if (k.proposed) continue;
        bounds.push_back(k.bound);
        owners.push_back(&k);
    }
    if (bounds.empty()) throw std::invalid_argument("err_boundary: no constraints");

    Boundary b;
    b.envelope = lower_envelope(bounds);
    double u0 = std::log10(window.lo), u1 = std::log10(window.hi);
    b.vertices = loglog_vertices(b.envelope, u0, u1);

    // Attribute each envelope span to the constraint whose bound matches it.
    for (const auto& seg : b.envelope.segments()) {
        double lo = std::max(seg.sigma_lo, window.lo);
        double hi = std::min(seg.sigma_hi, window.hi);
        if (!(lo < hi)) continue;
        double probe = std::sqrt(lo * hi);
        double v = seg.value_at(probe);
        const Constraint* owner = nullptr;
        for (const auto* k : owners) {
            auto bv = bound_at(k->bound, probe);
            if (bv && std::abs(*bv - v) <= 1e-12 * std::abs(v)) {
                owner = k;
                break;
            }
        }
        if (owner)
            b.spans.push_back(BoundarySpan{std::log10(lo), std::log10(hi), owner->source});
    }
    return b;
}

PiecewiseBound diffraction_envelope(const std::vector<DiffractionExperiment>& experiments,
                                    Theory theory, std::optional<int> year_max,
                                    bool include_proposed) {
    std::vector<PiecewiseBound> bounds;
    for (const auto& exp : experiments) {
        if (exp.proposed && !include_proposed) continue;
        if (year_max && exp.year > *year_max) continue;
        bounds.push_back(catalog::diffraction_constraint(exp, theory).bound);
    }
    if (bounds.empty()) throw std::invalid_argument("diffraction_envelope: no experiments pass the filter");
    return lower_envelope(bounds);
}

CoverageResult coverage_check(const ModelSpec& spec,
                              const std::vector<DiffractionExperiment>& experiments,
                              const Window& window, int grid_n, ExecMode mode) {
    if (grid_n < 2) throw std::invalid_argument("coverage_check: grid_n must be >= 2");
    if (!(window.sigma_lo > 0.0) || !(window.sigma_lo < window.sigma_hi) ||
        !(window.lambda_lo > 0.0) || !(window.lambda_lo < window.lambda_hi))
        throw std::invalid_argument("coverage_check: bad window");

    auto constraints = build_constraints(spec, experiments);
    double u0 = std::log10(window.sigma_lo), u1 = std::log10(window.sigma_hi);
    double v0 = std::log10(window.lambda_lo), v1 = std::log10(window.lambda_hi);

    std::vector<char> acceptable(static_cast<std::size_t>(grid_n) * grid_n, 0);
    auto eval_row = [&](int i) {
        double u = u0 + (u1 - u0) * i / (grid_n - 1);
        double sigma = std::pow(10.0, u);
        for (int j = 0; j < grid_n; ++j) {
            double v = v0 + (v1 - v0) * j / (grid_n - 1);
            ParamPoint pt(sigma, std::pow(10.0, v));
            auto cls = classify_point(spec, constraints, pt);
            acceptable[static_cast<std::size_t>(i) * grid_n + j] =
                cls.status() == Status::Acceptable ? 1 : 0;
        }
    };

    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < grid_n; ++i) eval_row(i);
    } else {
        for (int i = 0; i < grid_n; ++i) eval_row(i);
    }

    // Scan in fixed row-major order so the witness is schedule-independent.
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            if (acceptable[static_cast<std::size_t>(i) * grid_n + j]) {
                double u = u0 + (u1 - u0) * i / (grid_n - 1);
                double v = v0 + (v1 - v0) * j / (grid_n - 1);
                return CoverageResult{false, ParamPoint(std::pow(10.0, u), std::pow(10.0, v)),
                                      grid_n};
            }
        }
    }
    return CoverageResult{true, std::nullopt, grid_n};
}

} // namespace collapsemap::classify
