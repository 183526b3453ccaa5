#include "collapsemap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace collapsemap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCrossingMergeTol = 1e-12;  // in log10(sigma)

// A segment viewed as a line v = intercept + slope * u in log-log coordinates,
// u = log10(sigma), v = log10(lambda).
struct LogLine {
    double intercept;
    double slope;
    double u_lo;
    double u_hi;
    double coeff;
    double exponent;

    double value(double u) const { return intercept + slope * u; }
};

double to_log_u(double sigma) { return sigma > 0.0 ? std::log10(sigma) : -kInf; }

std::vector<LogLine> to_lines(const PiecewiseBound& pb) {
    std::vector<LogLine> lines;
    lines.reserve(pb.segments().size());
    for (const auto& s : pb.segments()) {
        lines.push_back(LogLine{std::log10(s.coeff), s.exponent, to_log_u(s.sigma_lo),
                                s.sigma_hi == kInf ? kInf : to_log_u(s.sigma_hi), s.coeff,
                                s.exponent});
    }
    return lines;
}

} // namespace

double PowerLawSegment::value_at(double sigma) const {
    return coeff * std::pow(sigma, exponent);
}

PiecewiseBound::PiecewiseBound(std::vector<PowerLawSegment> segments)
    : segments_(std::move(segments)) {
    std::sort(segments_.begin(), segments_.end(),
              [](const PowerLawSegment& a, const PowerLawSegment& b) {
                  return a.sigma_lo < b.sigma_lo;
              });
    for (const auto& s : segments_) {
        if (!(s.coeff > 0.0)) throw std::invalid_argument("PowerLawSegment: coeff must be > 0");
        if (!(s.sigma_lo < s.sigma_hi))
            throw std::invalid_argument("PowerLawSegment: sigma_lo must be < sigma_hi");
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (segments_[i].sigma_lo != segments_[i - 1].sigma_hi)
            throw std::invalid_argument("PiecewiseBound: segments must tile a contiguous range");
    }
}

std::optional<double> bound_at(const PiecewiseBound& pb, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bound_at: sigma must be positive");
    const auto& segs = pb.segments();
    auto it = std::upper_bound(segs.begin(), segs.end(), sigma,
                               [](double v, const PowerLawSegment& s) { return v < s.sigma_lo; });
    if (it == segs.begin()) return std::nullopt;
    --it;
    if (!it->contains(sigma)) return std::nullopt;
    return it->value_at(sigma);
}

bool is_excluded(const PiecewiseBound& pb, const ParamPoint& pt) {
    auto b = bound_at(pb, pt.sigma);
    return b.has_value() && pt.lambda > *b;
}

PiecewiseBound lower_envelope(const std::vector<PiecewiseBound>& bounds) {
    if (bounds.empty()) throw std::invalid_argument("lower_envelope: no constraints");

    std::vector<LogLine> lines;
    for (const auto& b : bounds) {
        auto ls = to_lines(b);
        lines.insert(lines.end(), ls.begin(), ls.end());
    }
    if (lines.empty()) throw std::invalid_argument("lower_envelope: no segments");

    // Breakpoint candidates: every segment endpoint plus every pairwise
    // crossing inside the overlap of the two segment domains.
    std::vector<double> cuts;
    for (const auto& l : lines) {
        if (std::isfinite(l.u_lo)) cuts.push_back(l.u_lo);
        if (std::isfinite(l.u_hi)) cuts.push_back(l.u_hi);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto& a = lines[i];
            const auto& b = lines[j];
            if (a.slope == b.slope) continue;
            double u = (b.intercept - a.intercept) / (a.slope - b.slope);
            if (u > std::max(a.u_lo, b.u_lo) && u < std::min(a.u_hi, b.u_hi))
                cuts.push_back(u);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a < kCrossingMergeTol; }),
               cuts.end());

    double lo_edge = kInf, hi_edge = -kInf;
    for (const auto& l : lines) {
        lo_edge = std::min(lo_edge, l.u_lo);
        hi_edge = std::max(hi_edge, l.u_hi);
    }

    // Elementary intervals between consecutive cuts, with open-ended pieces at
    // either side when a domain edge is infinite.
    std::vector<std::pair<double, double>> intervals;
    std::vector<double> edges = cuts;
    if (lo_edge == -kInf) edges.insert(edges.begin(), -kInf);
    if (hi_edge == kInf) edges.push_back(kInf);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        intervals.emplace_back(edges[i], edges[i + 1]);

    std::vector<PowerLawSegment> out;
    for (auto [ua, ub] : intervals) {
        if (!(ua < ub)) continue;
        double probe;
        if (std::isfinite(ua) && std::isfinite(ub)) probe = 0.5 * (ua + ub);
        else if (std::isfinite(ua)) probe = ua + 1.0;
        else if (std::isfinite(ub)) probe = ub - 1.0;
        else probe = 0.0;

        const LogLine* best = nullptr;
        double best_v = kInf;
        for (const auto& l : lines) {
            if (probe < l.u_lo || probe >= l.u_hi) continue;
            double v = l.value(probe);
            if (v < best_v) {
                best_v = v;
                best = &l;
            }
        }
        if (!best) continue;  // gap in the union domain

        double s_lo = std::isfinite(ua) ? std::pow(10.0, ua) : 0.0;
        double s_hi = std::isfinite(ub) ? std::pow(10.0, ub) : kInf;
        if (!out.empty() && out.back().coeff == best->coeff &&
            out.back().exponent == best->exponent && out.back().sigma_hi == s_lo) {
            out.back().sigma_hi = s_hi;  // same winning line continues
        } else {
            out.push_back(PowerLawSegment{best->coeff, best->exponent, s_lo, s_hi});
        }
    }
    return PiecewiseBound(out);
}

std::vector<std::pair<double, double>> loglog_vertices(const PiecewiseBound& pb, double u_min,
                                                       double u_max) {
    std::vector<std::pair<double, double>> verts;
    for (const auto& s : pb.segments()) {
        double a = std::max(u_min, to_log_u(s.sigma_lo));
        double b = std::min(u_max, s.sigma_hi == kInf ? kInf : to_log_u(s.sigma_hi));
        if (!(a <= b)) continue;
        double log_c = std::log10(s.coeff);
        if (verts.empty() || verts.back().first < a - 1e-15)
            verts.emplace_back(a, log_c + s.exponent * a);
        verts.emplace_back(b, log_c + s.exponent * b);
    }
    return verts;
}

} // namespace collapsemap
