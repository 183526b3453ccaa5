#include "doctest.h"

#include <cmath>
#include <string>

#include "collapsemap/render.hpp"
#include "test_util.hpp"

using namespace collapsemap;
using namespace collapsemap::render;
namespace cls = collapsemap::classify;
namespace cat = collapsemap::catalog;

namespace {
std::vector<cat::DiffractionExperiment> all_experiments() {
    auto exps = cat::load_experiments_file(testutil::data_dir() + "/diffraction.tab");
    auto prop = cat::load_experiments_file(testutil::data_dir() + "/diffraction_proposed.tab");
    exps.insert(exps.end(), prop.begin(), prop.end());
    return exps;
}

int count_occurrences(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}
} // namespace

TEST_CASE("render: byte-identical across runs") {
    cls::ModelSpec spec;
    DiagramConfig cfg;
    cfg.grid_resolution = 80;
    auto exps = all_experiments();
    auto a = render_diagram(spec, cfg, exps);
    auto b = render_diagram(spec, cfg, exps);
    CHECK(a == b);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);
}

TEST_CASE("render: main diagram has two region fills, two markers, and both markers sit outside the fills") {
    cls::ModelSpec spec;  // GRW, matter density, solid layers
    DiagramConfig cfg;
    cfg.grid_resolution = 120;
    auto exps = all_experiments();
    auto svg = render_diagram(spec, cfg, exps);

    CHECK(count_occurrences(svg, "class=\"fill-err\"") == 1);
    CHECK(count_occurrences(svg, "class=\"fill-pur\"") == 1);
    CHECK(count_occurrences(svg, "class=\"marker\"") == 2);

    // the fills come from the classification grid; the markers' grid cells
    // must classify Acceptable
    auto constraints = cls::build_constraints(spec, exps);
    for (const auto& m : cfg.markers) {
        auto c = cls::classify_point(spec, constraints, ParamPoint(m.sigma, m.lambda));
        CHECK(c.status() == cls::Status::Acceptable);
    }
}

TEST_CASE("render: per-source mode draws the five family curves with their styles") {
    cls::ModelSpec spec;
    spec.theory = Theory::CSL;
    spec.layers = cls::LayerSet::all();
    spec.layers.sound = false;
    DiagramConfig cfg;
    cfg.grid_resolution = 60;
    cfg.per_source_curves = true;
    auto svg = render_diagram(spec, cfg, all_experiments());

    CHECK(svg.find("curve-xray") != std::string::npos);
    CHECK(svg.find("curve-igm-warming") != std::string::npos);
    CHECK(svg.find("curve-cave-warming") != std::string::npos);
    CHECK(svg.find("curve-supercurrent") != std::string::npos);
    CHECK(svg.find("curve-diffraction") != std::string::npos);

    // styles: IGM dashed, supercurrent dash-dot
    auto igm_pos = svg.find("curve-igm-warming");
    auto igm_line = svg.substr(igm_pos, svg.find('\n', igm_pos) - igm_pos);
    CHECK(igm_line.find("stroke-dasharray=\"8,5\"") != std::string::npos);
    auto sc_pos = svg.find("curve-supercurrent");
    auto sc_line = svg.substr(sc_pos, svg.find('\n', sc_pos) - sc_pos);
    CHECK(sc_line.find("stroke-dasharray=\"10,4,2,4\"") != std::string::npos);
}

TEST_CASE("render: year-growth mode draws nested outlines and a dotted proposed curve") {
    cls::ModelSpec spec;
    spec.include_proposed = true;
    DiagramConfig cfg;
    cfg.year_growth = true;
    cfg.v_min = -20.0;
    cfg.v_max = 18.0;  // early-year bounds sit far above the main-figure window
    cfg.grid_resolution = 60;
    auto svg = render_diagram(spec, cfg, all_experiments());
    CHECK(count_occurrences(svg, "curve-year") == 3);
    CHECK(count_occurrences(svg, "curve-proposed") == 1);
    auto pos = svg.find("curve-proposed");
    auto line = svg.substr(pos, svg.find('\n', pos) - pos);
    CHECK(line.find("stroke-dasharray=\"2,4\"") != std::string::npos);
}

TEST_CASE("render: GRW flash diagram uses the flash PUR") {
    cls::ModelSpec spec;
    spec.ontology = Ontology::Flash;
    DiagramConfig cfg;
    cfg.grid_resolution = 60;
    auto exps = all_experiments();
    auto svg_flash = render_diagram(spec, cfg, exps);
    spec.ontology = Ontology::MatterDensity;
    auto svg_matter = render_diagram(spec, cfg, exps);
    CHECK(svg_flash != svg_matter);
}

TEST_CASE("render: bad window or resolution is rejected") {
    cls::ModelSpec spec;
    DiagramConfig cfg;
    cfg.u_min = 1.0;
    cfg.u_max = -1.0;
    CHECK_THROWS_AS(render_diagram(spec, cfg, {}), std::invalid_argument);
    DiagramConfig cfg2;
    cfg2.grid_resolution = 10;
    CHECK_THROWS_AS(render_diagram(spec, cfg2, {}), std::invalid_argument);
}
