// collapsemap: classify collapse-model parameters, reproduce the bound table,
// export region boundaries, render parameter diagrams, and run the jump /
// stochastic-equation ensembles.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "collapsemap/classify.hpp"
#include "collapsemap/csl.hpp"
#include "collapsemap/grw.hpp"
#include "collapsemap/render.hpp"

using json = nlohmann::ordered_json;
using namespace collapsemap;

namespace {

std::string sci6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

struct CommonOpts {
    std::string theory = "grw";
    std::string ontology = "matter";
    std::string layers = "solid";
    std::string data = "data/diffraction.tab";
    std::string proposed_data = "data/diffraction_proposed.tab";
    std::optional<int> year_max;
    bool include_proposed = false;
    std::string config_file;
    bool json_out = false;
};

Theory parse_theory(const std::string& s) {
    if (s == "grw") return Theory::GRW;
    if (s == "csl") return Theory::CSL;
    throw CLI::ValidationError("--theory", "expected grw or csl");
}

Ontology parse_ontology(const std::string& s) {
    if (s == "matter") return Ontology::MatterDensity;
    if (s == "flash") return Ontology::Flash;
    if (s == "smeared") return Ontology::MatterDensitySmeared;
    throw CLI::ValidationError("--ontology", "expected matter, flash or smeared");
}

classify::LayerSet parse_layers(const std::string& csv) {
    classify::LayerSet set;  // solid defaults
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        bool enable = true;
        if (tok[0] == '+') tok = tok.substr(1);
        else if (tok[0] == '-') {
            enable = false;
            tok = tok.substr(1);
        }
        if (tok == "solid") set = classify::LayerSet{};
        else if (tok == "all") set = classify::LayerSet::all();
        else if (tok == "diffraction") set.diffraction = enable;
        else if (tok == "xray") set.xray = enable;
        else if (tok == "cave") set.cave_warming = enable;
        else if (tok == "igm") set.igm_warming = enable;
        else if (tok == "supercurrent") set.supercurrent = enable;
        else if (tok == "sound") set.sound = enable;
        else throw CLI::ValidationError("--layers", "unknown layer '" + tok + "'");
    }
    return set;
}

struct FileConfig {
    pur::AdequacyThresholds thresholds;
    pur::InkGeometry geometry;
    render::DiagramConfig diagram;
};

FileConfig load_config(const std::string& path) {
    FileConfig fc;
    if (path.empty()) return fc;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        double value = std::stod(trim(line.substr(eq + 1)));
        if (key == "gamma_min") fc.thresholds.gamma_min = value;
        else if (key == "gamma_over_sigma2_min") fc.thresholds.gamma_over_sigma2_min = value;
        else if (key == "flash_count_min") fc.thresholds.flash_count_min = value;
        else if (key == "readout_time") fc.thresholds.readout_time = value;
        else if (key == "flash_smearing_max") fc.thresholds.flash_smearing_max = value;
        else if (key == "nucleons_per_digit") fc.geometry.nucleons_per_digit = value;
        else if (key == "ink_density") fc.geometry.ink_density = value;
        else if (key == "layer_thickness") fc.geometry.layer_thickness = value;
        else if (key == "line_width") fc.geometry.line_width = value;
        else if (key == "line_length_scale") fc.geometry.line_length_scale = value;
        else if (key == "window_u_min") fc.diagram.u_min = value;
        else if (key == "window_u_max") fc.diagram.u_max = value;
        else if (key == "window_v_min") fc.diagram.v_min = value;
        else if (key == "window_v_max") fc.diagram.v_max = value;
        else if (key == "grid_resolution") fc.diagram.grid_resolution = static_cast<int>(value);
        else
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return fc;
}

std::vector<catalog::DiffractionExperiment> load_data(const CommonOpts& opts) {
    auto exps = catalog::load_experiments_file(opts.data);
    if (opts.include_proposed) {
        auto prop = catalog::load_experiments_file(opts.proposed_data);
        exps.insert(exps.end(), prop.begin(), prop.end());
    }
    return exps;
}

classify::ModelSpec make_spec(const CommonOpts& opts, const FileConfig& fc) {
    classify::ModelSpec spec;
    spec.theory = parse_theory(opts.theory);
    spec.ontology = parse_ontology(opts.ontology);
    spec.layers = parse_layers(opts.layers);
    spec.year_max = opts.year_max;
    spec.include_proposed = opts.include_proposed;
    spec.thresholds = fc.thresholds;
    spec.geometry = fc.geometry;
    classify::validate(spec);
    return spec;
}

double parse_mass(const std::string& s) {
    auto c = codata2018();
    if (s == "proton") return c.m_p;
    if (s == "electron") return c.m_e;
    return std::stod(s);
}

int cmd_classify(const CommonOpts& opts, double sigma, double lambda) {
    auto fc = load_config(opts.config_file);
    auto spec = make_spec(opts, fc);
    auto exps = load_data(opts);
    auto constraints = classify::build_constraints(spec, exps);
    ParamPoint pt(sigma, lambda);
    auto cls = classify::classify_point(spec, constraints, pt);

    if (opts.json_out) {
        json out;
        out["status"] = classify::status_name(cls.status());
        out["unsatisfactory"] = cls.unsatisfactory;
        json refuted = json::array();
        for (const auto& s : cls.refuted_by) refuted.push_back(s.name());
        out["refuted_by"] = refuted;
        json bounds;
        for (const auto& c : constraints) {
            if (c.proposed) continue;
            auto b = bound_at(c.bound, sigma);
            bounds[c.source.name()] = b ? json(*b) : json(nullptr);
        }
        out["active_bounds_at_sigma"] = bounds;
        out["point"] = {{"sigma", sigma}, {"lambda", lambda}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "point: sigma = " << sci6(sigma) << " m, lambda = " << sci6(lambda)
                  << " 1/s\n";
        std::cout << "status: " << classify::status_name(cls.status()) << "\n";
        std::cout << "unsatisfactory: " << (cls.unsatisfactory ? "yes" : "no") << "\n";
        std::cout << "refuted_by:";
        if (cls.refuted_by.empty()) std::cout << " (none)";
        for (const auto& s : cls.refuted_by) std::cout << " " << s.name();
        std::cout << "\n";
        std::cout << "active bounds at sigma:\n";
        for (const auto& c : constraints) {
            if (c.proposed) continue;
            auto b = bound_at(c.bound, sigma);
            std::cout << "  " << c.source.name() << ": "
                      << (b ? sci6(*b) + " 1/s" : std::string("no bound")) << "\n";
        }
    }
    switch (cls.status()) {
        case classify::Status::Acceptable: return 0;
        case classify::Status::Refuted: return 10;
        case classify::Status::Unsatisfactory: return 11;
        case classify::Status::Both: return 12;
    }
    return 3;
}

int cmd_table(const CommonOpts& opts) {
    auto theory = parse_theory(opts.theory);
    auto exps = catalog::load_experiments_file(opts.data);
    json rows = json::array();
    bool all_ok = true;
    if (!opts.json_out)
        std::cout << "year  label            lambda<      (printed, ratio)       lambda/"
                     "sigma^2< (printed, ratio)\n";
    for (const auto& e : exps) {
        if (!e.flight_time) {
            if (opts.json_out) {
                rows.push_back({{"year", e.year},
                                {"label", e.label},
                                {"pass_through", true},
                                {"lambda_printed", e.printed_bounds
                                                       ? json(theory == Theory::GRW
                                                                  ? e.printed_bounds->grw_lambda
                                                                  : e.printed_bounds->csl_lambda)
                                                       : json(nullptr)}});
            } else {
                std::printf("%-5d %-16s (printed bounds pass-through, no flight time)\n",
                            e.year, e.label.c_str());
            }
            continue;
        }
        auto computed = catalog::diffraction_bounds(e, theory);
        double p_l = theory == Theory::GRW ? e.printed_bounds->grw_lambda
                                           : e.printed_bounds->csl_lambda;
        double p_r = theory == Theory::GRW ? e.printed_bounds->grw_ratio
                                           : e.printed_bounds->csl_ratio;
        double r1 = computed.lambda_max / p_l;
        double r2 = computed.ratio_max / p_r;
        bool ok = r1 >= 1.0 / 3 && r1 <= 3.0 && r2 >= 1.0 / 3 && r2 <= 3.0;
        all_ok = all_ok && ok;
        if (opts.json_out) {
            rows.push_back({{"year", e.year},
                            {"label", e.label},
                            {"pass_through", false},
                            {"lambda_computed", computed.lambda_max},
                            {"lambda_printed", p_l},
                            {"lambda_ratio", r1},
                            {"ratio_computed", computed.ratio_max},
                            {"ratio_printed", p_r},
                            {"ratio_ratio", r2},
                            {"within_factor_3", ok}});
        } else {
            std::printf("%-5d %-16s %s (%s, %.2f)  %s (%s, %.2f)%s\n", e.year,
                        e.label.c_str(), sci6(computed.lambda_max).c_str(), sci6(p_l).c_str(),
                        r1, sci6(computed.ratio_max).c_str(), sci6(p_r).c_str(), r2,
                        ok ? "" : "  ** outside [1/3,3]");
        }
    }
    if (opts.json_out) {
        json out;
        out["theory"] = opts.theory;
        out["rows"] = rows;
        out["all_within_factor_3"] = all_ok;
        std::cout << out.dump(2) << "\n";
    } else if (!all_ok) {
        std::cout << "warning: some derived bounds fall outside a factor of 3 of the printed "
                     "values\n";
    }
    return 0;
}

int cmd_envelope(const CommonOpts& opts, double sigma_min, double sigma_max,
                 const std::string& out_path) {
    auto fc = load_config(opts.config_file);
    auto spec = make_spec(opts, fc);
    auto exps = load_data(opts);
    auto boundary = classify::err_boundary(spec, exps, {sigma_min, sigma_max});

    std::ostringstream os;
    os << "# collapsemap envelope: theory=" << opts.theory << " layers=" << opts.layers << "\n";
    os << "# columns: log10_sigma log10_lambda\n";
    for (const auto& span : boundary.spans)
        os << "# span [" << sci6(span.u_lo) << ", " << sci6(span.u_hi) << ") "
           << span.source.name() << "\n";
    for (const auto& [u, v] : boundary.vertices) os << sci6(u) << " " << sci6(v) << "\n";

    if (out_path.empty() || out_path == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write '" + out_path + "'");
        f << os.str();
    }
    return 0;
}

int cmd_coverage(const CommonOpts& opts, double sigma_lo, double sigma_hi, double lambda_lo,
                 double lambda_hi, int grid_n, bool serial) {
    auto fc = load_config(opts.config_file);
    auto spec = make_spec(opts, fc);
    auto exps = load_data(opts);
    auto res = classify::coverage_check(spec, exps, {sigma_lo, sigma_hi, lambda_lo, lambda_hi},
                                        grid_n, serial ? ExecMode::Serial : ExecMode::Parallel);
    if (opts.json_out) {
        json out;
        out["covered"] = res.covered;
        out["grid"] = res.grid_n;
        if (res.witness)
            out["witness"] = {{"sigma", res.witness->sigma}, {"lambda", res.witness->lambda}};
        else
            out["witness"] = nullptr;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "covered: " << (res.covered ? "true" : "false") << " (grid " << res.grid_n
                  << "x" << res.grid_n << ")\n";
        if (res.witness)
            std::cout << "witness: sigma = " << sci6(res.witness->sigma)
                      << " m, lambda = " << sci6(res.witness->lambda) << " 1/s (acceptable)\n";
    }
    return 0;
}

int cmd_diagram(const CommonOpts& opts, bool fig2, bool fig3, const std::string& out_path,
                std::vector<double> window, int resolution) {
    auto fc = load_config(opts.config_file);
    auto spec = make_spec(opts, fc);
    auto exps = load_data(opts);
    render::DiagramConfig cfg = fc.diagram;
    if (resolution > 0) cfg.grid_resolution = resolution;
    cfg.per_source_curves = fig2;
    cfg.year_growth = fig3;
    if (fig3) {
        cfg.v_min = -20.0;
        cfg.v_max = 18.0;  // early bounds sit far above the main-figure window
        cfg.fill_regions = false;
    }
    if (!window.empty()) {
        if (window.size() != 4)
            throw CLI::ValidationError("--window", "expected u_min u_max v_min v_max");
        cfg.u_min = window[0];
        cfg.u_max = window[1];
        cfg.v_min = window[2];
        cfg.v_max = window[3];
    }
    auto svg = render::render_diagram(spec, cfg, exps);
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + out_path + "'");
    f << svg;
    std::cout << "wrote " << out_path << " (" << svg.size() << " bytes)\n";
    return 0;
}

json config_echo_grw(const grw::SimConfig& cfg) {
    return {{"sigma", cfg.sigma},
            {"lambda_eff", cfg.lambda_eff},
            {"horizon", cfg.horizon},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"hamiltonian", cfg.hamiltonian == sim::Hamiltonian::FreeParticle ? "free" : "zero"},
            {"mass", cfg.mass}};
}

int cmd_simulate_grw(double sigma, double lambda_eff, const std::string& mass_str, int trials,
                     std::uint64_t seed, double horizon, double width, const std::string& ham,
                     double separation, const std::string& flash_path, bool serial,
                     bool json_out) {
    grw::SimConfig cfg;
    cfg.sigma = sigma;
    cfg.lambda_eff = lambda_eff;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.mass = parse_mass(mass_str);
    cfg.horizon = horizon > 0 ? horizon : (lambda_eff > 0 ? 10.0 / lambda_eff : 1.0);
    cfg.hamiltonian = ham == "zero" ? sim::Hamiltonian::Zero : sim::Hamiltonian::FreeParticle;
    double w = width > 0 ? width : sigma / 10.0;
    ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;

    auto initial = sim::PacketState::single(0.0, w, 0.0, cfg.hbar);
    std::vector<grw::FlashRecord> flashes;
    auto st = grw::run_ensemble(cfg, initial, mode, flash_path.empty() ? nullptr : &flashes);

    std::optional<grw::RateFit> deco;
    if (separation >= 0.0) deco = grw::decoherence_rate(cfg, separation, mode);

    if (!flash_path.empty()) {
        std::ofstream f(flash_path);
        if (!f) throw std::runtime_error("cannot write '" + flash_path + "'");
        f << "# trial time center\n";
        for (const auto& r : flashes)
            f << r.trial << " " << sci6(r.time) << " " << sci6(r.center) << "\n";
    }

    if (json_out) {
        json out;
        out["trials"] = st.trials;
        out["collapses_total"] = st.collapses_total;
        out["mean_energy_gain_per_collapse"] = st.mean_energy_gain_per_collapse;
        out["stderr"] = st.stderr_gain;
        out["energy_rate"] = st.energy_rate;
        out["energy_rate_stderr"] = st.stderr_rate;
        out["flash_count"] = st.collapses_total;
        if (deco) out["decoherence"] = {{"separation", separation}, {"rate", deco->rate}, {"se", deco->se}};
        out["config"] = config_echo_grw(cfg);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "grw ensemble: trials=" << st.trials << " seed=" << cfg.seed << "\n";
        std::cout << "  collapses total: " << st.collapses_total << " (mean "
                  << sci6(st.mean_collapse_count) << " per trial)\n";
        std::cout << "  mean energy gain per collapse: " << sci6(st.mean_energy_gain_per_collapse)
                  << " J (stderr " << sci6(st.stderr_gain) << ")\n";
        std::cout << "  energy gain rate: " << sci6(st.energy_rate) << " W (stderr "
                  << sci6(st.stderr_rate) << ")\n";
        if (deco)
            std::cout << "  decoherence rate at separation " << sci6(separation) << ": "
                      << sci6(deco->rate) << " 1/s (se " << sci6(deco->se) << ")\n";
        if (!flash_path.empty()) std::cout << "  flash log: " << flash_path << "\n";
    }
    return 0;
}

int cmd_simulate_csl(double sigma, double lambda_eff, const std::string& mass_str, int trials,
                     std::uint64_t seed, double horizon, double dt, const std::string& scheme,
                     int grid_n, double separation, bool serial, bool json_out) {
    csl::CSLConfig cfg;
    cfg.sigma = sigma;
    cfg.lambda_eff = lambda_eff;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.mass = parse_mass(mass_str);
    cfg.scheme = scheme == "linear" ? csl::Scheme::LinearUnraveling
                                    : csl::Scheme::NormalizedNonlinear;
    cfg.grid_n = grid_n;
    cfg.spacing = sigma / 8.0;
    cfg.origin = -0.5 * grid_n * cfg.spacing;
    cfg.dt = dt > 0 ? dt : (lambda_eff > 0 ? 1e-2 / lambda_eff : 1e-3);
    ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;

    bool decoherence_mode = separation >= 0.0;
    grw::RateFit fit{0.0, 0.0};
    double expected = 0.0;
    if (decoherence_mode) {
        cfg.hamiltonian = sim::Hamiltonian::Zero;
        cfg.horizon = horizon > 0 ? horizon : (lambda_eff > 0 ? 1.5 / lambda_eff : 1.0);
        fit = csl::csl_decoherence_rate(cfg, separation, mode);
        expected = csl::analytic_decoherence_rate(cfg, separation);
    } else {
        cfg.hamiltonian = sim::Hamiltonian::FreeParticle;
        // keep the packet well inside the periodic box for the whole run
        double safe = (grid_n * cfg.spacing / 6.0) * (2.0 * cfg.mass * (sigma / 2.0)) / cfg.hbar;
        double want = lambda_eff > 0 ? 2.0 / lambda_eff : safe;
        cfg.horizon = horizon > 0 ? horizon : std::min(want, safe);
        fit = csl::csl_energy_rate(cfg, mode);
        expected = cfg.hbar * cfg.hbar * lambda_eff / (4.0 * cfg.mass * sigma * sigma);
    }

    if (json_out) {
        json out;
        out["mode"] = decoherence_mode ? "decoherence" : "energy";
        out["trials"] = cfg.trials;
        out["fitted_rate"] = fit.rate;
        out["se"] = fit.se;
        out["analytic_reference"] = expected;
        if (decoherence_mode) out["separation"] = separation;
        out["config"] = {{"sigma", cfg.sigma},
                         {"lambda_eff", cfg.lambda_eff},
                         {"dt", cfg.dt},
                         {"horizon", cfg.horizon},
                         {"scheme", cfg.scheme == csl::Scheme::LinearUnraveling ? "linear"
                                                                                : "nonlinear"},
                         {"grid_n", cfg.grid_n},
                         {"spacing", cfg.spacing},
                         {"seed", cfg.seed},
                         {"mass", cfg.mass}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "csl ensemble (" << (decoherence_mode ? "decoherence" : "energy")
                  << "): trials=" << cfg.trials << " seed=" << cfg.seed
                  << " scheme=" << (cfg.scheme == csl::Scheme::LinearUnraveling ? "linear" : "nonlinear")
                  << " dt=" << sci6(cfg.dt) << "\n";
        std::cout << "  fitted rate: " << sci6(fit.rate) << " (se " << sci6(fit.se) << ")\n";
        std::cout << "  analytic reference: " << sci6(expected) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapse-model parameter plane: constraints, diagrams, simulators"};
    app.require_subcommand(1);

    CommonOpts opts;
    double sigma = 1e-7, lambda = 1e-16;

    auto add_common = [&](CLI::App* cmd, bool with_ontology) {
        cmd->add_option("--theory", opts.theory, "grw or csl")->capture_default_str();
        if (with_ontology)
            cmd->add_option("--ontology", opts.ontology, "matter, flash or smeared")
                ->capture_default_str();
        cmd->add_option("--layers", opts.layers,
                        "comma list: solid, all, or [+-]{diffraction,xray,cave,igm,"
                        "supercurrent,sound}")
            ->capture_default_str();
        cmd->add_option("--data", opts.data, "experiment table")->capture_default_str();
        cmd->add_option("--proposed-data", opts.proposed_data, "proposed-experiment table")
            ->capture_default_str();
        cmd->add_flag("--include-proposed", opts.include_proposed,
                      "load proposed experiments (dotted layer)");
        cmd->add_option("--year-max", [&](const CLI::results_t& r) {
                opts.year_max = std::stoi(r[0]);
                return true;
            },
            "keep diffraction rows up to this year");
        cmd->add_option("--config", opts.config_file, "key=value overrides file");
        cmd->add_flag("--json", opts.json_out, "JSON report on stdout");
    };

    auto* c_classify = app.add_subcommand("classify", "classify one (sigma, lambda) point");
    add_common(c_classify, true);
    c_classify->add_option("--sigma", sigma, "collapse width, m")->required();
    c_classify->add_option("--lambda", lambda, "collapse rate, 1/s")->required();

    auto* c_table = app.add_subcommand("table", "recompute diffraction bounds vs printed values");
    add_common(c_table, false);

    double sigma_min = 1e-12, sigma_max = 1.0;
    std::string out_path;
    auto* c_envelope = app.add_subcommand("envelope", "export the refuted-region boundary");
    add_common(c_envelope, false);
    c_envelope->add_option("--sigma-min", sigma_min, "window lower edge, m")
        ->capture_default_str();
    c_envelope->add_option("--sigma-max", sigma_max, "window upper edge, m")
        ->capture_default_str();
    c_envelope->add_option("--out", out_path, "output path ('-' = stdout)");

    double lam_lo = 1e-36, lam_hi = 1e4;
    int grid_n = 200;
    bool serial = false;
    auto* c_coverage = app.add_subcommand("coverage", "is the whole window refuted or unsatisfactory?");
    add_common(c_coverage, true);
    c_coverage->add_option("--sigma-min", sigma_min)->capture_default_str();
    c_coverage->add_option("--sigma-max", sigma_max)->capture_default_str();
    c_coverage->add_option("--lambda-min", lam_lo)->capture_default_str();
    c_coverage->add_option("--lambda-max", lam_hi)->capture_default_str();
    c_coverage->add_option("--grid", grid_n, "grid points per axis")->capture_default_str();
    c_coverage->add_flag("--serial", serial, "reference serial execution");

    bool fig2 = false, fig3 = false;
    std::vector<double> window;
    int resolution = 0;
    auto* c_diagram = app.add_subcommand("diagram", "render an SVG parameter diagram");
    add_common(c_diagram, true);
    c_diagram->add_option("--out", out_path, "output SVG path")->required();
    c_diagram->add_flag("--fig2", fig2, "per-source boundary curves");
    c_diagram->add_flag("--fig3", fig3, "diffraction-region growth by year");
    c_diagram->add_option("--window", window, "u_min u_max v_min v_max (log10)")->expected(4);
    c_diagram->add_option("--resolution", resolution, "fill grid cells per axis");

    double lambda_eff = 1.0, horizon = 0.0, width = 0.0, separation = -1.0, dt = 0.0;
    std::string mass_str = "proton", ham = "free", scheme = "nonlinear", flash_path;
    int trials = 10000;
    std::uint64_t seed = 12345;
    bool sim_json = false, sim_serial = false;
    double g_sigma = 1e-7;

    auto* c_grw = app.add_subcommand("simulate-grw", "jump-process Monte Carlo ensemble");
    c_grw->add_option("--sigma", g_sigma, "collapse width, m")->capture_default_str();
    c_grw->add_option("--lambda-eff", lambda_eff, "per-particle collapse rate, 1/s")
        ->capture_default_str();
    c_grw->add_option("--mass", mass_str, "proton, electron, or kg")->capture_default_str();
    c_grw->add_option("--trials", trials)->capture_default_str();
    c_grw->add_option("--seed", seed)->capture_default_str();
    c_grw->add_option("--horizon", horizon, "trial length, s (default 10/lambda_eff)");
    c_grw->add_option("--width", width, "initial packet width, m (default sigma/10)");
    c_grw->add_option("--hamiltonian", ham, "free or zero")->capture_default_str();
    c_grw->add_option("--separation", separation,
                      "also fit the two-packet decoherence rate at this separation, m");
    c_grw->add_option("--flash-log", flash_path, "write 'trial time center' lines here");
    c_grw->add_flag("--serial", sim_serial, "reference serial execution");
    c_grw->add_flag("--json", sim_json, "JSON report");

    auto* c_csl = app.add_subcommand("simulate-csl", "stochastic-equation ensemble");
    c_csl->add_option("--sigma", g_sigma, "collapse width, m")->capture_default_str();
    c_csl->add_option("--lambda-eff", lambda_eff, "effective collapse rate, 1/s")
        ->capture_default_str();
    c_csl->add_option("--mass", mass_str, "proton, electron, or kg")->capture_default_str();
    c_csl->add_option("--trials", trials)->capture_default_str();
    c_csl->add_option("--seed", seed)->capture_default_str();
    c_csl->add_option("--horizon", horizon, "trial length, s");
    c_csl->add_option("--dt", dt, "time step, s (default 1e-2/lambda_eff)");
    c_csl->add_option("--scheme", scheme, "nonlinear or linear")->capture_default_str();
    c_csl->add_option("--grid-n", grid_n, "grid points (power of two)")->default_val(256);
    c_csl->add_option("--separation", separation,
                      "decoherence mode: two-packet separation, m (default: energy mode)");
    c_csl->add_flag("--serial", sim_serial, "reference serial execution");
    c_csl->add_flag("--json", sim_json, "JSON report");

    try {
        app.parse(argc, argv);
        if (c_classify->parsed()) return cmd_classify(opts, sigma, lambda);
        if (c_table->parsed()) return cmd_table(opts);
        if (c_envelope->parsed()) return cmd_envelope(opts, sigma_min, sigma_max, out_path);
        if (c_coverage->parsed())
            return cmd_coverage(opts, sigma_min, sigma_max, lam_lo, lam_hi, grid_n, serial);
        if (c_diagram->parsed()) return cmd_diagram(opts, fig2, fig3, out_path, window, resolution);
        if (c_grw->parsed())
            return cmd_simulate_grw(g_sigma, lambda_eff, mass_str, trials, seed, horizon, width,
                                    ham, separation, flash_path, sim_serial, sim_json);
        if (c_csl->parsed())
            return cmd_simulate_csl(g_sigma, lambda_eff, mass_str, trials, seed, horizon, dt,
                                    scheme, grid_n, separation, sim_serial, sim_json);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
