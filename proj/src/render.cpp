#include "collapsemap/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace collapsemap::render {

using catalog::Constraint;
using catalog::SourceKind;
using classify::ModelSpec;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Frame {
    double u0, u1, v0, v1;
    double left = 70, right = 240, top = 30, bottom = 55;
    int w = 0, h = 0;

    double px(double u) const { return left + (u - u0) / (u1 - u0) * (w - left - right); }
    double py(double v) const { return top + (v1 - v) / (v1 - v0) * (h - top - bottom); }
};

using Polyline = std::vector<std::pair<double, double>>;

/// Clip a (u,v) polyline to the v-window, interpolating at the crossings.
Polyline clip_v(const Polyline& in, double v_min, double v_max) {
    Polyline out;
    auto inside = [&](double v) { return v >= v_min && v <= v_max; };
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i > 0) {
            auto [ua, va] = in[i - 1];
            auto [ub, vb] = in[i];
            for (double edge : {v_min, v_max}) {
                if ((va < edge) != (vb < edge) && vb != va) {
                    double t = (edge - va) / (vb - va);
                    out.emplace_back(ua + t * (ub - ua), edge);
                }
            }
        }
        if (inside(in[i].second)) out.push_back(in[i]);
    }
    return out;
}

void emit_polyline(std::ostringstream& svg, const Frame& f, const Polyline& pts,
                   const std::string& stroke, const std::string& dash,
                   const std::string& cls) {
    if (pts.size() < 2) return;
    svg << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.6\"";
    if (!dash.empty()) svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) svg << " ";
        svg << fmt(f.px(pts[i].first)) << "," << fmt(f.py(pts[i].second));
    }
    svg << "\"/>\n";
}

std::string dash_for(const Constraint& c) {
    if (c.proposed) return "2,4";
    if (c.source.kind == SourceKind::Supercurrent) return "10,4,2,4";
    return c.confidence == Confidence::Dashed ? "8,5" : "";
}

std::string curve_label(SourceKind kind) {
    switch (kind) {
        case SourceKind::XRay: return "I  x-ray emission";
        case SourceKind::IGMWarming: return "II  IGM warming";
        case SourceKind::CaveWarming: return "III  air warming";
        case SourceKind::Supercurrent: return "IV  supercurrents";
        case SourceKind::Diffraction: return "V  diffraction";
        case SourceKind::Sound: return "sound";
    }
    return "?";
}

/// Boundary of the philosophically unsatisfactory region as a polyline in
/// (log10 sigma, log10 lambda); vertical pieces mark all-lambda cutoffs.
Polyline pur_boundary(const ModelSpec& spec, double u_min, double u_max, double v_max) {
    const auto& th = spec.thresholds;
    const auto& geom = spec.geometry;
    const double N = geom.nucleons_per_digit;
    Polyline pts;
    auto grwm_v = [&](double u) {
        double sigma = std::pow(10.0, u);
        double lam = std::max(th.gamma_min / N, th.gamma_over_sigma2_min * sigma * sigma / N);
        return std::log10(lam);
    };
    double u_smear = std::log10(th.flash_smearing_max);
    if (spec.theory == Theory::GRW && spec.ontology == Ontology::Flash) {
        double v_f = std::log10(th.flash_count_min / (N * th.readout_time));
        pts.emplace_back(u_min, v_f);
        if (u_smear < u_max) {
            pts.emplace_back(u_smear, v_f);
            pts.emplace_back(u_smear, v_max);
        } else {
            pts.emplace_back(u_max, v_f);
        }
        return pts;
    }
    if (spec.theory == Theory::GRW) {
        double u_cross = 0.5 * std::log10(th.gamma_min / th.gamma_over_sigma2_min);
        bool smeared = spec.ontology == Ontology::MatterDensitySmeared;
        double u_stop = smeared ? std::min(u_smear, u_max) : u_max;
        pts.emplace_back(u_min, grwm_v(u_min));
        if (u_cross > u_min && u_cross < u_stop) pts.emplace_back(u_cross, grwm_v(u_cross));
        pts.emplace_back(u_stop, grwm_v(u_stop));
        if (smeared && u_smear < u_max) pts.emplace_back(u_smear, v_max);
        return pts;
    }
    // CSLm: threshold curve with breakpoints at the ink-geometry changeovers
    std::vector<double> breaks = {u_min, std::log10(geom.layer_thickness),
                                  std::log10(geom.line_width),
                                  std::log10(geom.line_length_scale),
                                  0.5 * std::log10(th.gamma_min / th.gamma_over_sigma2_min),
                                  u_max};
    std::sort(breaks.begin(), breaks.end());
    for (double u : breaks) {
        if (u < u_min || u > u_max) continue;
        double sigma = std::pow(10.0, u);
        pts.emplace_back(u, std::log10(pur::cslm_threshold(sigma, th, geom)));
    }
    return pts;
}

} // namespace

std::string render_diagram(const ModelSpec& spec, const DiagramConfig& cfg,
                           const std::vector<catalog::DiffractionExperiment>& experiments) {
    if (!(cfg.u_min < cfg.u_max) || !(cfg.v_min < cfg.v_max))
        throw std::invalid_argument("render_diagram: empty window");
    if (cfg.grid_resolution < 50)
        throw std::invalid_argument("render_diagram: grid resolution must be >= 50");
    classify::validate(spec);

    Frame f{cfg.u_min, cfg.u_max, cfg.v_min, cfg.v_max};
    f.w = cfg.width_px;
    f.h = cfg.height_px;

    auto constraints = classify::build_constraints(spec, experiments);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << f.w
        << "px\" height=\"" << f.h << "px\" viewBox=\"0 0 " << f.w << " " << f.h << "\">\n"
        << "<defs>\n"
        << "<pattern id=\"hatch\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\" "
           "patternUnits=\"userSpaceOnUse\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
           "stroke=\"#7a5a8c\" stroke-width=\"1.2\"/></pattern>\n"
        << "</defs>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // region fills from the classification grid, rectangles merged per row
    if (cfg.fill_regions && !cfg.year_growth) {
        const int n = cfg.grid_resolution;
        std::vector<char> err(static_cast<std::size_t>(n) * n), unsat(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            double u = cfg.u_min + (cfg.u_max - cfg.u_min) * (i + 0.5) / n;
            double sigma = std::pow(10.0, u);
            for (int j = 0; j < n; ++j) {
                double v = cfg.v_min + (cfg.v_max - cfg.v_min) * (j + 0.5) / n;
                auto cls = classify::classify_point(spec, constraints,
                                                    ParamPoint(sigma, std::pow(10.0, v)));
                err[static_cast<std::size_t>(i) * n + j] = cls.refuted_by.empty() ? 0 : 1;
                unsat[static_cast<std::size_t>(i) * n + j] = cls.unsatisfactory ? 1 : 0;
            }
        }
        auto emit_mask = [&](const std::vector<char>& mask, const char* klass,
                             const char* fill) {
            svg << "<g class=\"" << klass << "\" fill=\"" << fill << "\">\n";
            double du = (cfg.u_max - cfg.u_min) / n, dv = (cfg.v_max - cfg.v_min) / n;
            for (int j = 0; j < n; ++j) {
                int run_start = -1;
                for (int i = 0; i <= n; ++i) {
                    bool on = i < n && mask[static_cast<std::size_t>(i) * n + j];
                    if (on && run_start < 0) run_start = i;
                    if (!on && run_start >= 0) {
                        double ua = cfg.u_min + run_start * du, ub = cfg.u_min + i * du;
                        double va = cfg.v_min + j * dv, vb = va + dv;
                        svg << "<rect x=\"" << fmt(f.px(ua)) << "\" y=\"" << fmt(f.py(vb))
                            << "\" width=\"" << fmt(f.px(ub) - f.px(ua)) << "\" height=\""
                            << fmt(f.py(va) - f.py(vb)) << "\"/>\n";
                        run_start = -1;
                    }
                }
            }
            svg << "</g>\n";
        };
        emit_mask(unsat, "fill-pur", "#c8dcee");
        emit_mask(err, "fill-err", "#f6cdb4");
        std::vector<char> both(static_cast<std::size_t>(n) * n);
        bool any_both = false;
        for (std::size_t k = 0; k < both.size(); ++k) {
            both[k] = (err[k] && unsat[k]) ? 1 : 0;
            any_both = any_both || both[k];
        }
        if (any_both) emit_mask(both, "fill-overlap", "url(#hatch)");
    }

    // boundary curves
    if (cfg.year_growth) {
        std::vector<int> years;
        for (int y : cfg.year_steps) years.push_back(y);
        for (int y : years) {
            auto env = classify::diffraction_envelope(experiments, spec.theory, y, false);
            auto verts = clip_v(loglog_vertices(env, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#333333", "", "curve-year");
        }
        if (spec.include_proposed) {
            auto env = classify::diffraction_envelope(experiments, spec.theory, std::nullopt, true);
            auto verts = clip_v(loglog_vertices(env, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#333333", "2,4", "curve-proposed");
        }
    } else if (cfg.per_source_curves) {
        // one curve per family: non-diffraction constraints directly, the
        // diffraction layer as its lower envelope
        bool diffraction_done = false;
        for (const auto& c : constraints) {
            if (c.source.kind == SourceKind::Diffraction) {
                if (diffraction_done || c.proposed) continue;
                auto env = classify::diffraction_envelope(experiments, spec.theory,
                                                          spec.year_max, false);
                auto verts =
                    clip_v(loglog_vertices(env, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
                emit_polyline(svg, f, verts, "#222222", "", "curve-diffraction");
                diffraction_done = true;
                continue;
            }
            auto verts =
                clip_v(loglog_vertices(c.bound, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#222222", dash_for(c),
                          "curve-" + c.source.name());
        }
        if (spec.include_proposed) {
            auto env = classify::diffraction_envelope(experiments, spec.theory, spec.year_max,
                                                      true);
            auto verts = clip_v(loglog_vertices(env, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#222222", "2,4", "curve-proposed");
        }
    } else {
        bool any = false;
        for (const auto& c : constraints)
            if (!c.proposed) any = true;
        if (any) {
            auto boundary =
                classify::err_boundary(spec, experiments,
                                       {std::pow(10.0, cfg.u_min), std::pow(10.0, cfg.u_max)});
            auto verts = clip_v(boundary.vertices, cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#b03a2e", "", "curve-err");
        }
        if (spec.include_proposed) {
            auto env = classify::diffraction_envelope(experiments, spec.theory, spec.year_max,
                                                      true);
            auto verts = clip_v(loglog_vertices(env, cfg.u_min, cfg.u_max), cfg.v_min, cfg.v_max);
            emit_polyline(svg, f, verts, "#b03a2e", "2,4", "curve-proposed");
        }
    }
    if (!cfg.year_growth) {
        auto pb = clip_v(pur_boundary(spec, cfg.u_min, cfg.u_max, cfg.v_max), cfg.v_min, cfg.v_max);
        emit_polyline(svg, f, pb, "#2e5f8a", "5,3", "curve-pur");
    }

    // markers
    for (const auto& m : cfg.markers) {
        double u = std::log10(m.sigma), v = std::log10(m.lambda);
        if (u < cfg.u_min || u > cfg.u_max || v < cfg.v_min || v > cfg.v_max) continue;
        svg << "<circle class=\"marker\" cx=\"" << fmt(f.px(u)) << "\" cy=\"" << fmt(f.py(v))
            << "\" r=\"4\" fill=\"#111111\"/>\n"
            << "<text x=\"" << fmt(f.px(u) + 7) << "\" y=\"" << fmt(f.py(v) - 6)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << m.label << "</text>\n";
    }

    // axes: frame, integer-decade ticks, labels
    svg << "<rect x=\"" << fmt(f.px(cfg.u_min)) << "\" y=\"" << fmt(f.py(cfg.v_max))
        << "\" width=\"" << fmt(f.px(cfg.u_max) - f.px(cfg.u_min)) << "\" height=\""
        << fmt(f.py(cfg.v_min) - f.py(cfg.v_max))
        << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    for (int u = static_cast<int>(std::ceil(cfg.u_min)); u <= cfg.u_max; ++u) {
        double x = f.px(u), y = f.py(cfg.v_min);
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(y + 5) << "\" stroke=\"#000\"/>\n";
        if (u % 2 == 0)
            svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y + 20)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e"
                << u << "</text>\n";
    }
    for (int v = static_cast<int>(std::ceil(cfg.v_min)); v <= cfg.v_max; ++v) {
        double x = f.px(cfg.u_min), y = f.py(v);
        svg << "<line x1=\"" << fmt(x - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#000\"/>\n";
        if (v % 4 == 0)
            svg << "<text x=\"" << fmt(x - 8) << "\" y=\"" << fmt(y + 4)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << v
                << "</text>\n";
    }
    svg << "<text x=\"" << fmt(0.5 * (f.px(cfg.u_min) + f.px(cfg.u_max))) << "\" y=\""
        << fmt(f.py(cfg.v_min) + 40)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">collapse "
           "width sigma [m]</text>\n"
        << "<text x=\"16\" y=\"" << fmt(f.py(cfg.v_max) - 10)
        << "\" font-family=\"sans-serif\" font-size=\"13\">collapse rate lambda [1/s]</text>\n";

    // legend
    double lx = f.px(cfg.u_max) + 18, ly = f.py(cfg.v_max) + 10;
    auto legend_line = [&](const std::string& label, const std::string& swatch) {
        svg << swatch << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 10)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
        ly += 20;
    };
    auto swatch_rect = [&](const std::string& fill) {
        std::ostringstream s;
        s << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly) << "\" width=\"24\" height=\"12\" fill=\""
          << fill << "\" stroke=\"#999\"/>\n";
        return s.str();
    };
    auto swatch_line = [&](const std::string& dash) {
        std::ostringstream s;
        s << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly + 6) << "\" x2=\"" << fmt(lx + 24)
          << "\" y2=\"" << fmt(ly + 6) << "\" stroke=\"#222\" stroke-width=\"1.6\"";
        if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
        s << "/>\n";
        return s.str();
    };
    if (cfg.fill_regions && !cfg.year_growth) {
        legend_line("empirically refuted", swatch_rect("#f6cdb4"));
        legend_line("philosophically unsatisfactory", swatch_rect("#c8dcee"));
        legend_line("overlap", swatch_rect("url(#hatch)"));
    }
    if (cfg.year_growth) {
        for (int y : cfg.year_steps) legend_line("diffraction up to " + std::to_string(y), swatch_line(""));
        if (spec.include_proposed) legend_line("proposed experiments", swatch_line("2,4"));
    } else if (cfg.per_source_curves) {
        bool diffraction_done = false;
        for (const auto& c : constraints) {
            if (c.proposed) continue;
            if (c.source.kind == SourceKind::Diffraction) {
                if (diffraction_done) continue;
                diffraction_done = true;
            }
            legend_line(curve_label(c.source.kind), swatch_line(dash_for(c)));
        }
        if (spec.include_proposed) legend_line("proposed experiments", swatch_line("2,4"));
    }
    if (!cfg.year_growth) legend_line("PUR boundary", swatch_line("5,3"));

    svg << "</svg>\n";
    return svg.str();
}

} // namespace collapsemap::render
