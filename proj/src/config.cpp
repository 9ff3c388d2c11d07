#include "nnma/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nnma {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& path) {
    KeyValueFile file;
    file.path = path;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const size_t hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(path, lineno, "expected 'key = values'");
        std::string key = trim(line.substr(0, eq));
        const std::string rhs = trim(line.substr(eq + 1));
        if (key.empty()) fail(path, lineno, "empty key");

        ConfigEntry entry;
        entry.line = lineno;
        std::istringstream keystream(key);
        std::string head;
        keystream >> head;
        entry.key = lower(head);
        if (entry.key == "location") {
            keystream >> entry.name;
            if (entry.name.empty()) fail(path, lineno, "location entries need a name");
        } else {
            std::string extra;
            if (keystream >> extra) fail(path, lineno, "unexpected token '" + extra + "' in key");
        }

        std::istringstream values(rhs);
        std::string tok;
        while (values >> tok) {
            try {
                size_t used = 0;
                entry.values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                fail(path, lineno, "'" + tok + "' is not a number");
            }
        }
        if (entry.values.empty()) fail(path, lineno, "no values for key '" + entry.key + "'");
        file.entries.push_back(std::move(entry));
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

const ConfigEntry* KeyValueFile::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::vector<double> KeyValueFile::require(const std::string& key, size_t count) const {
    const ConfigEntry* e = find(key);
    if (!e) throw ConfigError(path + ": missing key '" + key + "'");
    if (e->values.size() != count)
        fail(path, e->line, "key '" + key + "' needs " + std::to_string(count) + " values");
    return e->values;
}

ModelConfig parse_model_config(const KeyValueFile& file) {
    ModelConfig cfg;
    const auto wn = file.require("omega_n", 2);
    const auto z = file.require("zeta", 2);
    const auto a = file.require("alpha", 4);
    const auto g = file.require("gamma", 5);
    cfg.model.omega_n << wn[0], wn[1];
    cfg.model.zeta << z[0], z[1];
    cfg.model.alpha << a[0], a[1], a[2], a[3];
    cfg.model.gamma << g[0], g[1], g[2], g[3], g[4];
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(file.path + ": " + e.what());
    }

    std::vector<std::string> names;
    std::vector<Eigen::Vector2d> rows;
    for (const auto& entry : file.entries) {
        if (entry.key != "location") continue;
        if (entry.values.size() != 2)
            fail(file.path, entry.line, "location rows need two mode-shape values");
        names.push_back(entry.name);
        rows.emplace_back(entry.values[0], entry.values[1]);
    }
    if (!names.empty()) {
        ModeShapeMatrix shapes;
        shapes.locations = names;
        shapes.phi.resize(static_cast<Eigen::Index>(rows.size()), 2);
        for (size_t j = 0; j < rows.size(); ++j) shapes.phi.row(j) = rows[j].transpose();
        try {
            shapes.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(file.path + ": " + e.what());
        }
        cfg.shapes = std::move(shapes);
    }
    return cfg;
}

ModalModel resolve_model(const std::string& name_or_path,
                         std::optional<ModeShapeMatrix>* shapes_out) {
    if (name_or_path == "crossbeam-table1" || name_or_path.empty()) {
        if (shapes_out) *shapes_out = std::nullopt;
        return crossbeam_table1();
    }
    const ModelConfig cfg = parse_model_config(KeyValueFile::load(name_or_path));
    if (shapes_out) *shapes_out = cfg.shapes;
    return cfg.model;
}

ModeShapeMatrix load_shapes(const std::string& path) {
    const KeyValueFile file = KeyValueFile::load(path);
    std::vector<std::string> names;
    std::vector<Eigen::Vector2d> rows;
    for (const auto& entry : file.entries) {
        if (entry.key != "location") continue;
        if (entry.values.size() != 2)
            fail(file.path, entry.line, "location rows need two mode-shape values");
        names.push_back(entry.name);
        rows.emplace_back(entry.values[0], entry.values[1]);
    }
    if (names.empty()) throw ConfigError(path + ": no location rows found");
    ModeShapeMatrix shapes;
    shapes.locations = names;
    shapes.phi.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (size_t j = 0; j < rows.size(); ++j) shapes.phi.row(j) = rows[j].transpose();
    shapes.validate();
    return shapes;
}

void RunSettings::apply(const KeyValueFile& file) {
    for (const auto& e : file.entries) {
        auto one = [&](double* dst) {
            if (e.values.size() != 1) fail(file.path, e.line, "key '" + e.key + "' needs one value");
            *dst = e.values[0];
        };
        auto one_int = [&](int* dst) {
            if (e.values.size() != 1) fail(file.path, e.line, "key '" + e.key + "' needs one value");
            *dst = static_cast<int>(e.values[0]);
        };
        if (e.key == "harmonics") one_int(&harmonics);
        else if (e.key == "amp_ref") one(&amp_ref);
        else if (e.key == "seed_amplitude") one(&seed_amplitude);
        else if (e.key == "omega_min_hz") one(&omega_min_hz);
        else if (e.key == "omega_max_hz") one(&omega_max_hz);
        else if (e.key == "amplitude_max") one(&amplitude_max);
        else if (e.key == "force_max") one(&force_max);
        else if (e.key == "seed_force") one(&seed_force);
        else if (e.key == "max_points") one_int(&max_points);
        else if (e.key == "tol") one(&tol);
        else if (e.key == "max_newton") one_int(&max_newton);
        else if (e.key == "step_initial") one(&step_initial);
        else if (e.key == "step_min") one(&step_min);
        else if (e.key == "step_max") one(&step_max);
        else if (e.key == "growth") one(&growth);
        else fail(file.path, e.line, "unknown setting '" + e.key + "'");
    }
}

namespace {

ContinuationConfig base_continuation(const RunSettings& s) {
    ContinuationConfig cc;
    cc.tol = s.tol;
    cc.max_newton = s.max_newton;
    cc.step_initial = s.step_initial;
    cc.step_min = s.step_min;
    cc.step_max = s.step_max;
    cc.growth = s.growth;
    return cc;
}

}  // namespace

BackboneConfig RunSettings::backbone_config() const {
    BackboneConfig cfg;
    cfg.omega_min = 2.0 * M_PI * omega_min_hz;
    cfg.omega_max = 2.0 * M_PI * omega_max_hz;
    cfg.seed_amplitude = seed_amplitude;
    cfg.amp_ref = amp_ref;
    cfg.harmonics = harmonics;
    cfg.max_points = max_points;
    cfg.continuation = base_continuation(*this);
    return cfg;
}

QuadratureConfig RunSettings::quadrature_config() const {
    QuadratureConfig cfg;
    cfg.harmonics = harmonics;
    cfg.amp_ref = amp_ref;
    cfg.omega_min = 2.0 * M_PI * omega_min_hz;
    cfg.omega_max = 2.0 * M_PI * omega_max_hz;
    cfg.amplitude_max = amplitude_max;
    cfg.force_max = force_max;
    cfg.seed_force = seed_force;
    cfg.max_points = max_points;
    cfg.continuation = base_continuation(*this);
    return cfg;
}

std::string RunSettings::canonical() const {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "harmonics=%d amp_ref=%.17g seed_amplitude=%.17g omega_min_hz=%.17g "
                  "omega_max_hz=%.17g amplitude_max=%.17g force_max=%.17g seed_force=%.17g "
                  "max_points=%d tol=%.17g max_newton=%d step_initial=%.17g step_min=%.17g "
                  "step_max=%.17g growth=%.17g",
                  harmonics, amp_ref, seed_amplitude, omega_min_hz, omega_max_hz, amplitude_max,
                  force_max, seed_force, max_points, tol, max_newton, step_initial, step_min,
                  step_max, growth);
    return buf;
}

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nnma
