#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "collapsemap/types.hpp"

namespace collapsemap {

/// One power-law piece of an exclusion bound: lambda <= coeff * sigma^exponent
/// on the half-open sigma interval [sigma_lo, sigma_hi). Units of coeff depend
/// on the exponent (s^-1 m^-p).
struct PowerLawSegment {
    double coeff;
    double exponent;
    double sigma_lo;  // inclusive, >= 0
    double sigma_hi;  // exclusive, may be +infinity

    double value_at(double sigma) const;
    bool contains(double sigma) const { return sigma >= sigma_lo && sigma < sigma_hi; }
};

/// A sigma-interval-indexed family of power laws; the canonical form of every
/// constraint and PUR boundary. Segments are sorted, non-overlapping and
/// jointly cover a contiguous sigma range. Outside that range the bound is
/// undefined and excludes nothing.
class PiecewiseBound {
public:
    PiecewiseBound() = default;
    explicit PiecewiseBound(std::vector<PowerLawSegment> segments);

    const std::vector<PowerLawSegment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

private:
    std::vector<PowerLawSegment> segments_;
};

/// Bound value at sigma, or nullopt where the bound is undefined.
std::optional<double> bound_at(const PiecewiseBound& pb, double sigma);

/// Strict exclusion test: the point lies above the bound. Boundary points are
/// not excluded.
bool is_excluded(const PiecewiseBound& pb, const ParamPoint& pt);

/// Pointwise minimum of a family of bounds, computed exactly in log-log
/// coordinates (each segment is a line there). Defined wherever at least one
/// input is defined; crossings closer than 1e-12 in log10(sigma) are merged.
/// Throws std::invalid_argument on an empty list.
PiecewiseBound lower_envelope(const std::vector<PiecewiseBound>& bounds);

/// Vertices of the bound's graph in (log10 sigma, log10 lambda), restricted to
/// [u_min, u_max]. Adjacent vertices are joined by straight lines in log-log.
std::vector<std::pair<double, double>> loglog_vertices(const PiecewiseBound& pb,
                                                       double u_min, double u_max);

} // namespace collapsemap
