#include "nnma/branch_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nnma/backbone.hpp"
#include "nnma/quadrature.hpp"

namespace nnma {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string location_name(const BranchCsvSpec& spec, int j) {
    if (spec.shapes && j >= 0 && j < static_cast<int>(spec.shapes->locations.size()))
        return spec.shapes->locations[j];
    return "loc" + std::to_string(j);
}

}  // namespace

void write_branch_csv(const std::string& path, const Branch& branch, const BranchCsvSpec& spec) {
    if (branch.points.empty()) throw std::runtime_error(path + ": refusing to write empty branch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");

    const int H = spec.harmonics;
    std::vector<std::string> cols = {"index", "Omega_radps", "Omega_Hz", "U1", "U2", "phi1", "phi2"};
    for (int j : spec.force_locations) cols.push_back("F_" + location_name(spec, j));
    if (spec.colocated_location >= 0) cols.push_back("colocated_amplitude");
    for (int j : spec.phase_locations) cols.push_back("phase_" + location_name(spec, j));
    for (int i = 0; i < 2; ++i) {
        const std::string q = "q" + std::to_string(i + 1);
        cols.push_back(q + "_dc");
        for (int k = 1; k <= H; ++k) cols.push_back(q + "_c" + std::to_string(k));
        for (int k = 1; k <= H; ++k) cols.push_back(q + "_s" + std::to_string(k));
    }
    cols.push_back("step_used");
    cols.push_back("residual_norm");

    for (size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\n";

    const HbLayout lay{H};
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& pt = branch.points[i];
        const HarmonicSolution sol = unpack_hb_unknowns(pt.unknowns, H);
        const AmplitudePhase ap = amplitude_phase(sol);
        std::vector<std::string> row;
        row.push_back(std::to_string(i));
        row.push_back(format_g17(sol.omega));
        row.push_back(format_g17(sol.omega / (2.0 * M_PI)));
        row.push_back(format_g17(ap.U1));
        row.push_back(format_g17(ap.U2));
        row.push_back(format_g17(ap.phi1));
        row.push_back(format_g17(ap.phi2));
        for (size_t k = 0; k < spec.force_locations.size(); ++k)
            row.push_back(format_g17(pt.unknowns[lay.n_coeffs() + 1 + k]));
        if (spec.colocated_location >= 0) {
            const Eigen::Vector2d f = colocated_fundamental(sol, *spec.shapes, spec.colocated_location);
            row.push_back(format_g17(f.norm()));
        }
        if (!spec.phase_locations.empty()) {
            const std::vector<double> ph = phase_profile(sol, *spec.shapes, spec.phase_locations);
            for (double p : ph) row.push_back(format_g17(p));
        }
        for (int c = 0; c < lay.n_coeffs(); ++c) row.push_back(format_g17(sol.coeffs[c]));
        row.push_back(format_g17(pt.step_used));
        row.push_back(format_g17(pt.residual_norm));

        for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_analytic_branch_csv(const std::string& path, const Branch& branch) {
    if (branch.points.empty()) throw std::runtime_error(path + ": refusing to write empty branch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "index,Omega_radps,Omega_Hz,U1,U2\n";
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const Eigen::VectorXd& u = branch.points[i].unknowns;
        out << i << ',' << format_g17(u[2]) << ',' << format_g17(u[2] / (2.0 * M_PI)) << ','
            << format_g17(u[0]) << ',' << format_g17(u[1]) << "\n";
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::istringstream head(line);
    std::string cell;
    while (std::getline(head, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::runtime_error(path + ": ragged row");
        table.rows.push_back(std::move(row));
    }
    return table;
}

int CsvTable::column(const std::string& name) const {
    for (size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) return static_cast<int>(c);
    return -1;
}

double CsvTable::at(size_t row, const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw std::runtime_error("csv: missing column " + name);
    return rows.at(row).at(c);
}

HarmonicSolution solution_from_csv_row(const CsvTable& table, size_t row) {
    // Infer H from the q1_c* columns.
    int H = 0;
    while (table.column("q1_c" + std::to_string(H + 1)) >= 0) ++H;
    if (H == 0 || table.column("q1_dc") < 0)
        throw std::runtime_error("csv: no harmonic coefficient columns");
    HarmonicSolution sol;
    sol.n_harmonics = H;
    sol.resize_zero();
    const HbLayout lay = sol.layout();
    for (int i = 0; i < 2; ++i) {
        const std::string q = "q" + std::to_string(i + 1);
        sol.coeffs[lay.dc(i)] = table.at(row, q + "_dc");
        for (int k = 1; k <= H; ++k) {
            sol.coeffs[lay.cos(i, k)] = table.at(row, q + "_c" + std::to_string(k));
            sol.coeffs[lay.sin(i, k)] = table.at(row, q + "_s" + std::to_string(k));
        }
    }
    sol.omega = table.at(row, "Omega_radps");
    sol.forcing.omega = sol.omega;
    return sol;
}

Eigen::Vector2d modal_force_from_csv_row(const CsvTable& table, size_t row,
                                         const ModeShapeMatrix& shapes) {
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
    for (size_t c = 0; c < table.columns.size(); ++c) {
        const std::string& name = table.columns[c];
        if (name.rfind("F_", 0) != 0) continue;
        const int j = shapes.index_of(name.substr(2));
        if (j < 0) throw std::runtime_error("csv: unknown force location in column " + name);
        p += table.rows.at(row).at(c) * shapes.row(j);
    }
    return p;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["tool"] = "nnma";
    j["version"] = manifest.tool_version;
    j["task"] = manifest.task;
    j["config_hash"] = manifest.config_hash;
    j["model_hash"] = manifest.model_hash;
    j["settings"] = manifest.settings;
    nlohmann::ordered_json arts = nlohmann::ordered_json::array();
    for (const auto& a : manifest.artifacts) {
        nlohmann::ordered_json e;
        e["path"] = a;
        e["config_hash"] = manifest.config_hash;
        arts.push_back(e);
    }
    j["artifacts"] = arts;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace nnma
