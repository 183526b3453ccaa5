#pragma once

#include <string>
#include <vector>

#include "collapsemap/classify.hpp"

namespace collapsemap::render {

struct Marker {
    std::string label;
    double sigma;
    double lambda;
};

/// Figure window, layers and styling. Defaults reproduce the main parameter
/// diagram: filled refuted/unsatisfactory regions with exact boundary
/// overdraw, markers at the two canonical parameter choices.
struct DiagramConfig {
    double u_min = -12.0, u_max = 0.0;   // log10 sigma window
    double v_min = -36.0, v_max = 4.0;   // log10 lambda window
    bool fill_regions = true;            // ERR/PUR fills from the classify grid
    bool per_source_curves = false;      // one styled curve per constraint family
    bool year_growth = false;            // nested diffraction outlines per year
    std::vector<int> year_steps = {1930, 1988, 2011};
    std::vector<Marker> markers = {{"GRW", 1e-7, 1e-16}, {"Adler", 1e-6, 3e-8}};
    int grid_resolution = 200;           // cells per axis for region fill
    int width_px = 880, height_px = 660;
};

/// Deterministic SVG 1.1 document for the spec/window: same inputs, same
/// bytes. Throws std::invalid_argument on an empty window or a resolution
/// below 50.
std::string render_diagram(const classify::ModelSpec& spec, const DiagramConfig& cfg,
                           const std::vector<catalog::DiffractionExperiment>& experiments);

} // namespace collapsemap::render
