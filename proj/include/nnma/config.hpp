#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnma/backbone.hpp"
#include "nnma/model.hpp"
#include "nnma/quadrature.hpp"

namespace nnma {

/// Config parse/validation failure with a file:line reference.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One "key = values..." line. Keys may repeat (location table rows).
struct ConfigEntry {
    std::string key;              ///< lowercase; "location <name>" keeps the name in `name`
    std::string name;             ///< location name for "location" entries
    std::vector<double> values;
    int line = 0;
};

/// Plain-text key/value file: `key = v1 v2 ...` with '#' comments.
struct KeyValueFile {
    std::string path;
    std::vector<ConfigEntry> entries;

    static KeyValueFile parse(const std::string& text, const std::string& path);
    static KeyValueFile load(const std::string& path);

    const ConfigEntry* find(const std::string& key) const;
    /// Value list for `key` with an exact count; throws ConfigError.
    std::vector<double> require(const std::string& key, size_t count) const;
};

/// Model file: omega_n, zeta, alpha, gamma plus an optional location table.
struct ModelConfig {
    ModalModel model;
    std::optional<ModeShapeMatrix> shapes;
};
ModelConfig parse_model_config(const KeyValueFile& file);

/// Resolve --model arguments: a built-in name or a config file path.
/// A file's location table (if present) is returned through shapes.
ModalModel resolve_model(const std::string& name_or_path,
                         std::optional<ModeShapeMatrix>* shapes_out = nullptr);

/// Shape table from a config file containing only location rows (or a full
/// model file, in which case the table is extracted).
ModeShapeMatrix load_shapes(const std::string& path);

/// Solver settings shared by the CLI subcommands, overridable from a run
/// config file. Keys are documented in the README.
struct RunSettings {
    int harmonics = 5;
    double amp_ref = 1e-3;
    double seed_amplitude = 5e-5;
    double omega_min_hz = 16.1;
    double omega_max_hz = 20.0;
    double amplitude_max = 0.12;
    double force_max = 1e3;
    double seed_force = 2e-4;
    int max_points = 4000;
    double tol = 1e-9;
    int max_newton = 25;
    double step_initial = 2e-3;
    double step_min = 1e-8;
    double step_max = 0.05;
    double growth = 1.3;

    /// Apply recognized keys from a run config file; unknown keys raise
    /// ConfigError with the offending line.
    void apply(const KeyValueFile& file);

    BackboneConfig backbone_config() const;
    QuadratureConfig quadrature_config() const;

    /// Canonical text form (hash input and manifest payload).
    std::string canonical() const;
};

/// FNV-1a 64-bit hash, hex-encoded; used for config/model fingerprints.
std::string fnv1a_hex(const std::string& data);

}  // namespace nnma
