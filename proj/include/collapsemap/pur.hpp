#pragma once

#include "collapsemap/types.hpp"

namespace collapsemap::pur {

/// Geometry of one printed digit, used to count ink nucleons within a collapse
/// width. Defaults reproduce the printed piecewise coefficients.
struct InkGeometry {
    double nucleons_per_digit = 4e18;  // N
    double ink_density = 1e30;         // nucleons per m^3
    double layer_thickness = 1e-5;     // m
    double line_width = 1e-4;          // m
    double line_length_scale = 1e-3;   // m, total stroke scale of a digit
};

/// What it takes for a readout to decay fast enough (and, for flashes, to be
/// drawn from enough events).
struct AdequacyThresholds {
    double gamma_min = 2.0;               // s^-1
    double gamma_over_sigma2_min = 2e6;   // m^-2 s^-1
    double flash_count_min = 10.0;
    double readout_time = 0.5;            // s
    double flash_smearing_max = 1e-3;     // m
};

/// Number of ink nucleons within distance sigma of a point of a digit:
/// sphere, then disk through the ink layer, then a stroke segment, then the
/// whole digit. Piecewise in sigma with jumps at the shape changeovers.
double ink_n(double sigma, const InkGeometry& geom = {});

/// GRWm: unsatisfactory iff the digit's collapse rate Gamma = N lambda fails
/// Gamma > gamma_min or Gamma/sigma^2 > gamma_over_sigma2_min.
bool grwm_pur(const ParamPoint& pt, const AdequacyThresholds& th = {},
              const InkGeometry& geom = {});

/// CSLm: minimal satisfactory lambda at this sigma, from Gamma = n N lambda
/// and the same two Gamma conditions. Points at or below it are
/// unsatisfactory.
double cslm_threshold(double sigma, const AdequacyThresholds& th = {},
                      const InkGeometry& geom = {});

bool cslm_pur(const ParamPoint& pt, const AdequacyThresholds& th = {},
              const InkGeometry& geom = {});

/// GRWf: too few flashes per readout (lambda below flash_count_min /
/// (N * readout_time)) or flash positions smeared beyond recognition
/// (sigma above flash_smearing_max).
bool grwf_pur(const ParamPoint& pt, const AdequacyThresholds& th = {},
              const InkGeometry& geom = {});

/// GRWm with the matter density smeared by the collapse Gaussian: the plain
/// GRWm region plus everything with sigma above flash_smearing_max.
bool grwm_smeared_pur(const ParamPoint& pt, const AdequacyThresholds& th = {},
                      const InkGeometry& geom = {});

} // namespace collapsemap::pur
