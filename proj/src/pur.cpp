#include "collapsemap/pur.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collapsemap::pur {

double ink_n(double sigma, const InkGeometry& g) {
    using std::numbers::pi;
    if (sigma < g.layer_thickness)
        return 4.0 / 3.0 * pi * sigma * sigma * sigma * g.ink_density;
    if (sigma < g.line_width)
        return pi * sigma * sigma * g.ink_density * g.layer_thickness;
    if (sigma < g.line_length_scale)
        return sigma * g.nucleons_per_digit / g.line_length_scale;
    return g.nucleons_per_digit;
}

bool grwm_pur(const ParamPoint& pt, const AdequacyThresholds& th, const InkGeometry& geom) {
    double gamma = geom.nucleons_per_digit * pt.lambda;
    bool satisfactory =
        gamma > th.gamma_min && gamma / (pt.sigma * pt.sigma) > th.gamma_over_sigma2_min;
    return !satisfactory;
}

double cslm_threshold(double sigma, const AdequacyThresholds& th, const InkGeometry& geom) {
    double gamma_needed = std::max(th.gamma_min, th.gamma_over_sigma2_min * sigma * sigma);
    return gamma_needed / (ink_n(sigma, geom) * geom.nucleons_per_digit);
}

bool cslm_pur(const ParamPoint& pt, const AdequacyThresholds& th, const InkGeometry& geom) {
    return pt.lambda <= cslm_threshold(pt.sigma, th, geom);
}

bool grwf_pur(const ParamPoint& pt, const AdequacyThresholds& th, const InkGeometry& geom) {
    double lambda_min = th.flash_count_min / (geom.nucleons_per_digit * th.readout_time);
    return pt.lambda < lambda_min || pt.sigma > th.flash_smearing_max;
}

bool grwm_smeared_pur(const ParamPoint& pt, const AdequacyThresholds& th,
                      const InkGeometry& geom) {
    return grwm_pur(pt, th, geom) || pt.sigma > th.flash_smearing_max;
}

} // namespace collapsemap::pur
