#pragma once

#include <map>
#include <string>
#include <vector>

#include "nnma/continuation.hpp"
#include "nnma/hb.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Column layout of an exported harmonic-balance branch. Force and phase
/// columns are named after their locations; coefficient columns carry the
/// full Fourier state so a branch file is self-contained for re-verification.
struct BranchCsvSpec {
    int harmonics = 5;
    const ModeShapeMatrix* shapes = nullptr;   ///< needed for force/phase columns
    std::vector<int> force_locations;          ///< F_<name> columns
    int colocated_location = -1;               ///< colocated_amplitude column
    std::vector<int> phase_locations;          ///< phase_<name> columns
};

/// Writes a branch of [coeffs, omega, F...] points. Deterministic: fixed
/// column order, 17 significant digits. Throws std::runtime_error on I/O
/// failure.
void write_branch_csv(const std::string& path, const Branch& branch, const BranchCsvSpec& spec);

/// Writes an analytic backbone branch ([U1, U2, omega] points).
void write_analytic_branch_csv(const std::string& path, const Branch& branch);

/// Parsed CSV: header names plus a row-major value table.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;   ///< -1 if absent
    double at(size_t row, const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

/// Reconstruct the harmonic solution stored in one row of a branch CSV
/// (coefficient columns q<i>_dc/q<i>_c<k>/q<i>_s<k> plus Omega_radps).
HarmonicSolution solution_from_csv_row(const CsvTable& table, size_t row);

/// Modal force fundamental stored in one row (F_* columns projected through
/// the shape table; zero when the file has no force columns).
Eigen::Vector2d modal_force_from_csv_row(const CsvTable& table, size_t row,
                                         const ModeShapeMatrix& shapes);

/// Deterministic JSON run manifest: tool version, task, hashes, settings and
/// produced artifacts (no timestamps, so identical runs give identical
/// bytes).
struct RunManifest {
    std::string tool_version;
    std::string task;
    std::string config_hash;
    std::string model_hash;
    std::map<std::string, std::string> settings;
    std::vector<std::string> artifacts;
};
void write_manifest(const std::string& path, const RunManifest& manifest);

/// 17-significant-digit representation used by all exports.
std::string format_g17(double v);

}  // namespace nnma
