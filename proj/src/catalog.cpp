#include "collapsemap/catalog.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace collapsemap::catalog {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string ConstraintSource::name() const {
    switch (kind) {
        case SourceKind::XRay: return "xray";
        case SourceKind::IGMWarming: return "igm-warming";
        case SourceKind::CaveWarming: return "cave-warming";
        case SourceKind::Supercurrent: return "supercurrent";
        case SourceKind::Diffraction:
            return "diffraction:" + std::to_string(year) + ":" + label;
        case SourceKind::Sound: return "sound";
    }
    return "?";
}

DiffractionBoundPair diffraction_bounds(const DiffractionExperiment& exp, Theory theory) {
    if (exp.flight_time) {
        double s = mass_scaling(theory, exp.mass_ratio);
        double lambda_max = 1.0 / (*exp.flight_time * s);
        double d = exp.grating_period;
        return {lambda_max, lambda_max / (d * d)};
    }
    if (exp.printed_bounds) {
        const auto& p = *exp.printed_bounds;
        return theory == Theory::GRW ? DiffractionBoundPair{p.grw_lambda, p.grw_ratio}
                                     : DiffractionBoundPair{p.csl_lambda, p.csl_ratio};
    }
    throw std::runtime_error("diffraction_bounds: insufficient data for '" + exp.label +
                             "' (no flight time, no printed bounds)");
}

Constraint diffraction_constraint(const DiffractionExperiment& exp, Theory theory) {
    auto b = diffraction_bounds(exp, theory);
    double d = exp.grating_period;
    PiecewiseBound bound({
        PowerLawSegment{b.lambda_max, 0.0, 0.0, d},
        PowerLawSegment{b.ratio_max, 2.0, d, kInf},
    });
    return Constraint{ConstraintSource{SourceKind::Diffraction, exp.year, exp.label}, theory,
                      std::move(bound), Confidence::Solid, exp.proposed};
}

double collapse_energy(double mass, double sigma, const PhysicalConstants& c) {
    return 3.0 * c.hbar * c.hbar / (4.0 * mass * sigma * sigma);
}

double temperature_rate(Theory theory, const ParamPoint& pt, double mass_ratio,
                        const PhysicalConstants& c) {
    double rate = c.hbar * c.hbar / (8.0 * c.k_B * c.m_p) * pt.lambda / (pt.sigma * pt.sigma);
    return theory == Theory::CSL ? rate * mass_ratio : rate;
}

double energy_rate(Theory theory, double n_particles, double mass_ratio, const ParamPoint& pt,
                   const PhysicalConstants& c) {
    double rate =
        0.75 * c.hbar * c.hbar * n_particles / c.m_p * pt.lambda / (pt.sigma * pt.sigma);
    return theory == Theory::CSL ? rate * mass_ratio : rate;
}

Constraint cave_warming_constraint(Theory theory, const PhysicalConstants& c) {
    // dT/dt < 3e-2 K/day (the July cave measurement), read per day.
    double dTdt_limit = 3e-2 / seconds_per_day;
    double prefactor = c.hbar * c.hbar / (8.0 * c.k_B * c.m_p);
    if (theory == Theory::CSL) prefactor *= air_mass_ratio;
    double coeff = dTdt_limit / prefactor;
    return Constraint{ConstraintSource{SourceKind::CaveWarming, 0, ""}, theory,
                      PiecewiseBound({PowerLawSegment{coeff, 2.0, 0.0, kInf}}),
                      Confidence::Solid};
}

Constraint igm_warming_constraint(Theory theory) {
    return Constraint{ConstraintSource{SourceKind::IGMWarming, 0, ""}, theory,
                      PiecewiseBound({PowerLawSegment{2e6, 2.0, 0.0, kInf}}),
                      Confidence::Dashed};
}

Constraint xray_constraint(Theory theory) {
    double c4 = 1e26;
    double c2 = theory == Theory::GRW ? 1e7 : 1e10;
    double crossing = std::sqrt(c2 / c4);
    PiecewiseBound bound({
        PowerLawSegment{c4, 4.0, 0.0, crossing},
        PowerLawSegment{c2, 2.0, crossing, kInf},
    });
    return Constraint{ConstraintSource{SourceKind::XRay, 0, ""}, theory, std::move(bound),
                      Confidence::Solid};
}

Constraint sound_constraint() {
    return Constraint{ConstraintSource{SourceKind::Sound, 0, ""}, std::nullopt,
                      PiecewiseBound({PowerLawSegment{1e-32, 0.0, 0.0, 1e-16}}),
                      Confidence::Solid};
}

Constraint supercurrent_constraint(Theory theory) {
    double c1 = theory == Theory::GRW ? 10.0 : 2e4;
    double c3 = theory == Theory::GRW ? 1e7 : 2e10;
    PiecewiseBound bound({
        PowerLawSegment{c1, 1.0, 0.0, 1e-3},
        PowerLawSegment{c3, 3.0, 1e-3, kInf},
    });
    return Constraint{ConstraintSource{SourceKind::Supercurrent, 0, ""}, theory, std::move(bound),
                      Confidence::Dashed};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void row_error(const std::string& where, int lineno, int field,
                            const std::string& name, const std::string& what) {
    std::ostringstream os;
    os << where << "line " << lineno << ", field " << field << " (" << name << "): " << what;
    throw std::runtime_error(os.str());
}

double parse_num(const std::string& where, int lineno, int field, const std::string& name,
                 const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        row_error(where, lineno, field, name, "cannot parse '" + text + "'");
    }
}

std::vector<DiffractionExperiment> parse_experiments(std::istream& in, const std::string& where) {
    static const char* field_names[] = {"year",       "label",      "reference",  "mass_ratio",
                                        "tau_s",      "d_m",        "grw_lambda", "grw_ratio",
                                        "csl_lambda", "csl_ratio",  "proposed"};
    std::vector<DiffractionExperiment> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_fields(t);
        if (fields.size() != 11)
            row_error(where, lineno, static_cast<int>(fields.size()), "record",
                      "expected 11 ';'-separated fields, got " + std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);

        DiffractionExperiment exp;
        exp.year = static_cast<int>(parse_num(where, lineno, 1, field_names[0], fields[0]));
        exp.label = fields[1];
        exp.reference = fields[2];
        exp.mass_ratio = parse_num(where, lineno, 4, field_names[3], fields[3]);
        if (!(exp.mass_ratio > 0.0))
            row_error(where, lineno, 4, field_names[3], "must be positive");
        if (fields[4] != "NA") {
            exp.flight_time = parse_num(where, lineno, 5, field_names[4], fields[4]);
            if (!(*exp.flight_time > 0.0))
                row_error(where, lineno, 5, field_names[4], "must be positive or NA");
        }
        exp.grating_period = parse_num(where, lineno, 6, field_names[5], fields[5]);
        if (!(exp.grating_period > 0.0))
            row_error(where, lineno, 6, field_names[5], "must be positive");

        bool any_bound = false, all_bounds = true;
        double vals[4] = {0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            if (fields[6 + k].empty()) {
                all_bounds = false;
            } else {
                vals[k] = parse_num(where, lineno, 7 + k, field_names[6 + k], fields[6 + k]);
                any_bound = true;
            }
        }
        if (any_bound && !all_bounds)
            row_error(where, lineno, 7, "printed bounds", "give all four bounds or none");
        if (all_bounds)
            exp.printed_bounds = PrintedBounds{vals[0], vals[1], vals[2], vals[3]};
        if (!exp.flight_time && !exp.printed_bounds)
            row_error(where, lineno, 7, "printed bounds", "required when tau_s is NA");

        if (fields[10] == "0") exp.proposed = false;
        else if (fields[10] == "1") exp.proposed = true;
        else row_error(where, lineno, 11, field_names[10], "expected 0 or 1");

        out.push_back(std::move(exp));
    }
    return out;
}

} // namespace

std::vector<DiffractionExperiment> load_experiments(std::istream& in) {
    return parse_experiments(in, "");
}

std::vector<DiffractionExperiment> load_experiments_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment file '" + path + "'");
    return parse_experiments(in, path + ": ");
}

} // namespace collapsemap::catalog
