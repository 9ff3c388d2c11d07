// nnma: nonlinear-normal-mode backbones, forced responses, quadrature loci
// and energy-balance force appropriation for two-mode modal models.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "nnma/appropriation.hpp"
#include "nnma/backbone.hpp"
#include "nnma/branch_io.hpp"
#include "nnma/config.hpp"
#include "nnma/quadrature.hpp"
#include "nnma/svg.hpp"
#include "nnma/time_domain.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
    std::string model = "crossbeam-table1";
    std::string shapes_path;
    std::string config_path;
    std::string out_dir = ".";
    std::string omega_range;
    int harmonics = 0;   // 0: keep settings default
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--model", opt.model, "Built-in model name or model config file");
    cmd->add_option("--shapes", opt.shapes_path, "Mode-shape table file (overrides the model file's)");
    cmd->add_option("--config", opt.config_path, "Run settings file");
    cmd->add_option("--out", opt.out_dir, "Output directory");
    cmd->add_option("--omega-range", opt.omega_range, "Frequency window in Hz, e.g. 16.1:20");
    cmd->add_option("--harmonics", opt.harmonics, "Harmonic truncation order");
    cmd->add_flag("--svg", opt.svg, "Also write an SVG plot");
}

struct Resolved {
    nnma::ModalModel model;
    nnma::ModeShapeMatrix shapes;
    nnma::RunSettings settings;
    std::string model_hash;
    std::string config_hash;
};

Resolved resolve(const CommonOptions& opt, const std::string& task) {
    Resolved r;
    std::optional<nnma::ModeShapeMatrix> file_shapes;
    r.model = nnma::resolve_model(opt.model, &file_shapes);
    if (!opt.shapes_path.empty())
        r.shapes = nnma::load_shapes(opt.shapes_path);
    else if (file_shapes)
        r.shapes = *file_shapes;
    else
        r.shapes = nnma::synthetic_shapes();
    r.model.validate();
    r.shapes.validate();

    if (!opt.config_path.empty()) r.settings.apply(nnma::KeyValueFile::load(opt.config_path));
    if (opt.harmonics > 0) r.settings.harmonics = opt.harmonics;
    if (!opt.omega_range.empty()) {
        const size_t colon = opt.omega_range.find(':');
        if (colon == std::string::npos)
            throw nnma::ConfigError("--omega-range expects lo:hi in Hz");
        r.settings.omega_min_hz = std::stod(opt.omega_range.substr(0, colon));
        r.settings.omega_max_hz = std::stod(opt.omega_range.substr(colon + 1));
        if (!(r.settings.omega_min_hz < r.settings.omega_max_hz))
            throw nnma::ConfigError("--omega-range needs lo < hi");
    }

    std::string model_text;
    for (int i = 0; i < 2; ++i)
        model_text += nnma::format_g17(r.model.omega_n[i]) + " " + nnma::format_g17(r.model.zeta[i]) + " ";
    for (int i = 0; i < 4; ++i) model_text += nnma::format_g17(r.model.alpha[i]) + " ";
    for (int i = 0; i < 5; ++i) model_text += nnma::format_g17(r.model.gamma[i]) + " ";
    for (Eigen::Index j = 0; j < r.shapes.phi.rows(); ++j)
        model_text += r.shapes.locations[j] + " " + nnma::format_g17(r.shapes.phi(j, 0)) + " " +
                      nnma::format_g17(r.shapes.phi(j, 1)) + " ";
    r.model_hash = nnma::fnv1a_hex(model_text);
    r.config_hash = nnma::fnv1a_hex(task + "|" + r.settings.canonical() + "|" + model_text);
    return r;
}

std::string out_path(const CommonOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return (std::filesystem::path(opt.out_dir) / name).string();
}

void write_run_manifest(const CommonOptions& opt, const Resolved& r, const std::string& task,
                        const std::vector<std::string>& artifacts) {
    nnma::RunManifest man;
    man.tool_version = kVersion;
    man.task = task;
    man.config_hash = r.config_hash;
    man.model_hash = r.model_hash;
    man.settings["canonical"] = r.settings.canonical();
    man.artifacts = artifacts;
    nnma::write_manifest(out_path(opt, "manifest.json"), man);
}

nnma::SvgSeries branch_series(const nnma::Branch& branch, int H, int amplitude_index,
                              const std::string& color, bool dashed, const std::string& label) {
    nnma::SvgSeries s;
    s.color = color;
    s.dashed = dashed;
    s.label = label;
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const nnma::BackbonePoint p = nnma::backbone_point(branch, i, 1);
        s.x.push_back(p.omega / (2 * M_PI));
        s.y.push_back(amplitude_index == 0 ? p.U1 : p.U2);
    }
    (void)H;
    return s;
}

int require_branch(const nnma::Branch& branch, const std::string& what) {
    if (branch.termination == nnma::Termination::seed_failure || branch.points.empty()) {
        std::cerr << "error: " << what << " failed to start (seed did not converge)\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------

int run_backbone(const CommonOptions& opt, int nnm, const std::string& method) {
    const Resolved r = resolve(opt, "backbone");
    const nnma::BackboneConfig cfg = r.settings.backbone_config();
    std::vector<std::string> artifacts;
    nnma::SvgPlot plot;
    plot.title = "backbone nnm" + std::to_string(nnm);
    plot.x_label = "frequency [Hz]";
    plot.y_label = "modal amplitude";

    if (method == "numeric" || method == "both") {
        const nnma::Branch b = nnma::solve_numeric_backbone(r.model, nnm, cfg);
        if (int rc = require_branch(b, "numeric backbone")) return rc;
        nnma::BranchCsvSpec spec;
        spec.harmonics = cfg.harmonics;
        spec.shapes = &r.shapes;
        const std::string name = "backbone_nnm" + std::to_string(nnm) + ".csv";
        nnma::write_branch_csv(out_path(opt, name), b, spec);
        artifacts.push_back(name);
        plot.series.push_back(branch_series(b, cfg.harmonics, 0, "#1f4e9c", false, "U1 numeric"));
        plot.series.push_back(branch_series(b, cfg.harmonics, 1, "#1f9c4e", false, "U2 numeric"));
        std::printf("backbone nnm%d: %zu points, %.4f..%.4f Hz (%s)\n", nnm, b.points.size(),
                    nnma::backbone_point(b, 0, nnm).omega / (2 * M_PI),
                    nnma::backbone_point(b, b.size() - 1, nnm).omega / (2 * M_PI),
                    nnma::to_string(b.termination).c_str());
    }
    if (method == "analytic" || method == "both") {
        const nnma::Branch b = nnma::solve_analytic_backbone(r.model, nnm, cfg);
        if (int rc = require_branch(b, "analytic backbone")) return rc;
        const std::string name = "backbone_nnm" + std::to_string(nnm) + "_analytic.csv";
        nnma::write_analytic_branch_csv(out_path(opt, name), b);
        artifacts.push_back(name);
        plot.series.push_back(branch_series(b, 0, 0, "#888888", true, "U1 analytic"));
        plot.series.push_back(branch_series(b, 0, 1, "#bbaa22", true, "U2 analytic"));
    }
    if (opt.svg) {
        const std::string name = "backbone_nnm" + std::to_string(nnm) + ".svg";
        plot.write(out_path(opt, name));
        artifacts.push_back(name);
    }
    write_run_manifest(opt, r, "backbone", artifacts);
    return 0;
}

int run_frf(const CommonOptions& opt, const std::vector<std::string>& locations,
            const std::vector<double>& amplitudes) {
    const Resolved r = resolve(opt, "frf");
    if (locations.size() != amplitudes.size() || locations.empty())
        throw nnma::ConfigError("frf needs matching --force-location/--force-amplitude pairs");
    nnma::ExcitationLayout layout;
    for (const auto& name : locations) {
        const int j = r.shapes.index_of(name);
        if (j < 0) throw nnma::ConfigError("unknown location '" + name + "'");
        layout.location_indices.push_back(j);
    }
    layout.amplitudes = amplitudes;
    layout.omega = 2 * M_PI * r.settings.omega_min_hz;

    const nnma::QuadratureConfig cfg = r.settings.quadrature_config();
    nnma::Branch b = nnma::forced_response(r.model, r.shapes, layout, cfg);
    if (int rc = require_branch(b, "forced response")) return rc;

    // Fixed amplitudes are appended so exported rows carry the full forcing.
    for (auto& pt : b.points) {
        Eigen::VectorXd u(pt.unknowns.size() + layout.amplitudes.size());
        u << pt.unknowns, Eigen::Map<const Eigen::VectorXd>(layout.amplitudes.data(),
                                                            layout.amplitudes.size());
        pt.unknowns = u;
    }

    nnma::BranchCsvSpec spec;
    spec.harmonics = cfg.harmonics;
    spec.shapes = &r.shapes;
    spec.force_locations = layout.location_indices;
    spec.colocated_location = layout.location_indices[0];
    for (int j = 0; j < r.shapes.phi.rows(); ++j) spec.phase_locations.push_back(j);
    nnma::write_branch_csv(out_path(opt, "frf.csv"), b, spec);
    std::vector<std::string> artifacts = {"frf.csv"};

    if (opt.svg) {
        nnma::SvgPlot plot;
        plot.title = "forced response";
        plot.x_label = "frequency [Hz]";
        plot.y_label = "modal amplitude";
        plot.series.push_back(branch_series(b, cfg.harmonics, 0, "#1f4e9c", false, "U1"));
        plot.series.push_back(branch_series(b, cfg.harmonics, 1, "#1f9c4e", false, "U2"));
        plot.write(out_path(opt, "frf.svg"));
        artifacts.push_back("frf.svg");
    }
    write_run_manifest(opt, r, "frf", artifacts);
    std::printf("frf: %zu points (%s)\n", b.points.size(), nnma::to_string(b.termination).c_str());
    return 0;
}

int run_quadrature(const CommonOptions& opt, const std::vector<std::string>& locations, int nnm,
                   int phase_sign) {
    const Resolved r = resolve(opt, "quadrature");
    if (locations.empty() || locations.size() > 2)
        throw nnma::ConfigError("quadrature needs one or two --force-location");
    std::vector<nnma::QuadratureConstraint> constraints;
    for (const auto& name : locations) {
        const int j = r.shapes.index_of(name);
        if (j < 0) throw nnma::ConfigError("unknown location '" + name + "'");
        constraints.push_back({j, phase_sign});
    }

    const nnma::QuadratureConfig cfg = r.settings.quadrature_config();
    const nnma::Branch b = nnma::quadrature_locus(r.model, r.shapes, constraints, nnm, cfg);
    if (int rc = require_branch(b, "quadrature locus")) return rc;

    nnma::BranchCsvSpec spec;
    spec.harmonics = cfg.harmonics;
    spec.shapes = &r.shapes;
    for (const auto& c : constraints) spec.force_locations.push_back(c.colocated_location);
    spec.colocated_location = constraints[0].colocated_location;
    for (int j = 0; j < r.shapes.phi.rows(); ++j) spec.phase_locations.push_back(j);
    nnma::write_branch_csv(out_path(opt, "quadrature.csv"), b, spec);
    std::vector<std::string> artifacts = {"quadrature.csv"};

    if (opt.svg) {
        nnma::SvgPlot plot;
        plot.title = "quadrature locus nnm" + std::to_string(nnm);
        plot.x_label = "frequency [Hz]";
        plot.y_label = "modal amplitude";
        plot.series.push_back(branch_series(b, cfg.harmonics, 0, "#1f4e9c", false, "U1 locus"));
        plot.series.push_back(branch_series(b, cfg.harmonics, 1, "#1f9c4e", false, "U2 locus"));
        const nnma::Branch bb = nnma::solve_numeric_backbone(r.model, nnm, r.settings.backbone_config());
        if (!bb.points.empty()) {
            plot.series.push_back(branch_series(bb, cfg.harmonics, 0, "#555555", true, "U1 nnm"));
            plot.series.push_back(branch_series(bb, cfg.harmonics, 1, "#999999", true, "U2 nnm"));
        }
        plot.write(out_path(opt, "quadrature.svg"));
        artifacts.push_back("quadrature.svg");
    }
    write_run_manifest(opt, r, "quadrature", artifacts);
    std::printf("quadrature locus: %zu points (%s), phase sign %+d\n", b.points.size(),
                nnma::to_string(b.termination).c_str(), phase_sign);
    return 0;
}

int run_appropriate(const CommonOptions& opt, const std::vector<std::string>& locations, int nnm) {
    const Resolved r = resolve(opt, "appropriate");
    if (locations.empty() || locations.size() > 2)
        throw nnma::ConfigError("appropriate needs one or two --force-location");
    std::vector<int> locs;
    for (const auto& name : locations) {
        const int j = r.shapes.index_of(name);
        if (j < 0) throw nnma::ConfigError("unknown location '" + name + "'");
        locs.push_back(j);
    }

    const nnma::Branch bb = nnma::solve_analytic_backbone(r.model, nnm, r.settings.backbone_config());
    if (int rc = require_branch(bb, "backbone")) return rc;

    const std::string name = "appropriate.csv";
    std::ofstream out(out_path(opt, name));
    if (locs.size() == 2) {
        out << "Omega_Hz,U1,U2,F_" << r.shapes.locations[locs[0]] << ",F_"
            << r.shapes.locations[locs[1]] << ",P1,P2\n";
        for (size_t i = 0; i < bb.points.size(); ++i) {
            const nnma::BackbonePoint p = nnma::backbone_point(bb, i, nnm);
            const auto res = nnma::two_force_appropriation(r.shapes, locs[0], locs[1], r.model, p);
            out << nnma::format_g17(p.omega / (2 * M_PI)) << ',' << nnma::format_g17(p.U1) << ','
                << nnma::format_g17(p.U2) << ',' << nnma::format_g17(res.forces[0]) << ','
                << nnma::format_g17(res.forces[1]) << ',' << nnma::format_g17(res.modal_forces[0])
                << ',' << nnma::format_g17(res.modal_forces[1]) << "\n";
        }
    } else {
        out << "Omega_Hz,U1,U2,F1,phi_d,flag\n";
        for (size_t i = 0; i < bb.points.size(); ++i) {
            const nnma::BackbonePoint p = nnma::backbone_point(bb, i, nnm);
            double F1 = 0.0;
            nnma::PhaseEstimate pe;
            try {
                F1 = nnma::single_force_amplitude(r.shapes, locs[0], r.model, p);
                pe = nnma::phase_error(r.model, r.shapes, locs[0], p, F1);
            } catch (const std::runtime_error&) {
                pe.status = nnma::PhaseErrorStatus::singular_appropriation;
            }
            out << nnma::format_g17(p.omega / (2 * M_PI)) << ',' << nnma::format_g17(p.U1) << ','
                << nnma::format_g17(p.U2) << ',' << nnma::format_g17(F1) << ','
                << nnma::format_g17(pe.status == nnma::PhaseErrorStatus::ok ? pe.value : 0.0) << ','
                << nnma::to_string(pe.status) << "\n";
        }
    }
    if (!out) {
        std::cerr << "error: write failed\n";
        return 1;
    }
    out.close();
    write_run_manifest(opt, r, "appropriate", {name});
    std::printf("appropriate: %zu backbone points processed\n", bb.points.size());
    return 0;
}

int run_phase_map(const CommonOptions& opt, int nnm, double target_omega_hz) {
    const Resolved r = resolve(opt, "phase-map");
    const nnma::Branch bb = nnma::solve_analytic_backbone(r.model, nnm, r.settings.backbone_config());
    if (int rc = require_branch(bb, "backbone")) return rc;

    // Nearest backbone point to the requested frequency.
    size_t pick = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < bb.points.size(); ++i) {
        const double f = nnma::backbone_point(bb, i, nnm).omega / (2 * M_PI);
        if (std::abs(f - target_omega_hz) < best) {
            best = std::abs(f - target_omega_hz);
            pick = i;
        }
    }
    const nnma::BackbonePoint target = nnma::backbone_point(bb, pick, nnm);
    const auto map = nnma::phase_error_map(r.model, r.shapes, target);

    const std::string name = "phase_map.csv";
    std::ofstream out(out_path(opt, name));
    out << "location,F1,phi_d,flag\n";
    for (const auto& e : map) {
        out << r.shapes.locations[e.location] << ',' << nnma::format_g17(e.F1) << ','
            << nnma::format_g17(e.phase.status == nnma::PhaseErrorStatus::ok ? e.phase.value : 0.0)
            << ','
            << (e.phase.status != nnma::PhaseErrorStatus::ok
                    ? nnma::to_string(e.phase.status)
                    : (e.saturated ? "saturated" : "ok"))
            << "\n";
    }
    out.close();
    std::vector<std::string> artifacts = {name};

    if (opt.svg) {
        nnma::SvgPlot plot;
        plot.title = "phase error map at " + std::to_string(target.omega / (2 * M_PI)) + " Hz";
        plot.x_label = "location index";
        plot.y_label = "";
        for (const auto& e : map) {
            nnma::SvgSeries dot;
            dot.scatter = true;
            dot.width = 3.0;
            dot.x = {static_cast<double>(e.location)};
            dot.y = {0.0};
            dot.color = e.saturated ? "#000000"
                                    : nnma::phase_error_color(std::abs(e.phase.value),
                                                              nnma::kPhaseSaturation);
            dot.label = r.shapes.locations[e.location];
            plot.series.push_back(dot);
        }
        plot.write(out_path(opt, "phase_map.svg"));
        artifacts.push_back("phase_map.svg");
    }
    write_run_manifest(opt, r, "phase-map", artifacts);
    std::printf("phase-map at %.4f Hz (nnm%d): %zu locations\n", target.omega / (2 * M_PI), nnm,
                map.size());
    return 0;
}

int run_verify(const CommonOptions& opt, const std::string& input, double tol_periodicity,
               double tol_energy) {
    const Resolved r = resolve(opt, "verify");
    const nnma::CsvTable table = nnma::read_csv(input);
    if (table.rows.empty()) {
        std::cerr << "error: " << input << " has no data rows\n";
        return 1;
    }
    // Branches without force columns are conservative-system orbits
    // (backbones); they are re-checked against the undamped model.
    bool forced = false;
    for (const auto& c : table.columns)
        if (c.rfind("F_", 0) == 0) forced = true;
    nnma::ModalModel model = r.model;
    if (!forced) model.zeta.setZero();

    int failures = 0;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const nnma::HarmonicSolution sol = nnma::solution_from_csv_row(table, i);
        const Eigen::Vector2d p = nnma::modal_force_from_csv_row(table, i, r.shapes);
        const double residual = nnma::periodicity_residual(model, p, sol);

        const nnma::EnergyBudget e = nnma::hb_energies(model, p, sol);
        const double dissipated = e.E_D1 + e.E_D2;
        const double injected = e.E_P1 + e.E_P2;
        const double balance =
            dissipated > 1e-300 ? std::abs(dissipated - injected) / dissipated : 0.0;

        const bool ok = residual < tol_periodicity && balance < tol_energy;
        if (!ok) ++failures;
        std::printf("point %4zu  f=%9.5f Hz  periodicity=%.3e  energy_balance=%.3e  %s\n", i,
                    sol.omega / (2 * M_PI), residual, balance, ok ? "ok" : "FAIL");
    }
    std::printf("verify: %zu points, %d failures (periodicity < %g, energy balance < %g)\n",
                table.rows.size(), failures, tol_periodicity, tol_energy);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear normal modes, quadrature curves and force appropriation\n"
                 "for two-mode nonlinear modal models"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOptions opt;
    int nnm = 1;
    int phase_sign = +1;
    std::string method = "numeric";
    std::vector<std::string> force_locations;
    std::vector<double> force_amplitudes;
    std::string verify_input;
    double target_omega_hz = 16.5;
    double tol_periodicity = 1e-5;
    double tol_energy = 1e-6;

    CLI::App* backbone = app.add_subcommand("backbone", "Trace an NNM backbone branch");
    add_common(backbone, opt);
    backbone->add_option("--nnm", nnm, "Which NNM (1 or 2)")->check(CLI::Range(1, 2));
    backbone->add_option("--method", method, "numeric | analytic | both")
        ->check(CLI::IsMember({"numeric", "analytic", "both"}));

    CLI::App* frf = app.add_subcommand("frf", "Fixed-force frequency response");
    add_common(frf, opt);
    frf->add_option("--force-location", force_locations, "Excitation location name (repeatable)");
    frf->add_option("--force-amplitude", force_amplitudes, "Force amplitude in N (repeatable)");

    CLI::App* quad = app.add_subcommand("quadrature", "Phase-quadrature locus with free force(s)");
    add_common(quad, opt);
    quad->add_option("--force-location", force_locations, "Excitation location name (one or two)");
    quad->add_option("--nnm", nnm, "Which NNM to start from")->check(CLI::Range(1, 2));
    quad->add_option("--phase-sign", phase_sign, "+1 or -1 quadrature sign")
        ->check(CLI::IsMember({+1, -1}));

    CLI::App* appr = app.add_subcommand("appropriate",
                                        "Energy-balance force appropriation along a backbone");
    add_common(appr, opt);
    appr->add_option("--force-location", force_locations, "One (single-force) or two locations");
    appr->add_option("--nnm", nnm, "Which NNM")->check(CLI::Range(1, 2));

    CLI::App* pmap = app.add_subcommand("phase-map", "Phase-error map over all locations");
    add_common(pmap, opt);
    pmap->add_option("--nnm", nnm, "Which NNM")->check(CLI::Range(1, 2));
    pmap->add_option("--target-omega", target_omega_hz, "Backbone point frequency in Hz")
        ->required();

    CLI::App* verify = app.add_subcommand("verify", "Re-check an exported branch CSV");
    add_common(verify, opt);
    verify->add_option("--in", verify_input, "Branch CSV to verify")->required();
    verify->add_option("--tol-periodicity", tol_periodicity, "Periodicity residual tolerance");
    verify->add_option("--tol-energy", tol_energy, "Relative energy balance tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(backbone)) return run_backbone(opt, nnm, method);
        if (app.got_subcommand(frf)) return run_frf(opt, force_locations, force_amplitudes);
        if (app.got_subcommand(quad)) return run_quadrature(opt, force_locations, nnm, phase_sign);
        if (app.got_subcommand(appr)) return run_appropriate(opt, force_locations, nnm);
        if (app.got_subcommand(pmap)) return run_phase_map(opt, nnm, target_omega_hz);
        if (app.got_subcommand(verify)) return run_verify(opt, verify_input, tol_periodicity, tol_energy);
    } catch (const nnma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
