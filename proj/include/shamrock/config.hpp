/**
 * @file config.hpp
 * @brief Strict JSON run configuration. Unknown keys and wrong types are errors.
 */
#pragma once

#include "cascade.hpp"
#include "defects.hpp"
#include "geometry.hpp"
#include "phononic.hpp"
#include "photonic.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace shamrock {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryConfig {
    double a_nm = 300.0;
    double d_over_a = 0.65;
    ShamrockHole hole;
    int resolution = 256;

    [[nodiscard]] LatticeSpec lattice() const { return LatticeSpec::hexagonal(a_nm * 1e-9, d_over_a); }
};

struct SolverConfig {
    int cutoff = 7;
    int n_bands = 10;
    int samples_per_segment = 12;
    int full_zone_grid = 0;  ///< n for an n x n full-zone gap cross-check, 0 = off
};

struct WaveguideConfig {
    DefectSpec spec;
    int n_transverse = 11;
    int cutoff = 4;
    int resolution = 64;
    int n_bands = 0;  ///< 0 picks 3 (photonic) or 6 (phononic) bands per transverse period
    int kx_samples = 11;
    double threshold = 0.6;
};

struct CavityConfig {
    HeterostructureSpec spec;
    double gmax_over_2pi = 3.5;
    int per_a = 32;
    int n_modes = 8;
    int resolution = 64;
};

struct WavepacketConfig {
    SpectralShape shape = SpectralShape::lorentzian;
    double center_GHz = 0.0;
    double width_GHz = 1.0;
};

struct CascadeConfig {
    EmitterRates rates;  ///< angular units (2 pi GHz)
    double regime_factor = 10.0;
    std::pair<double, double> delta_range_linewidths{-3.0, 3.0};
    int n_samples = 601;
    std::vector<double> beta_values{1.0, 0.98, 0.9, 0.8};
    std::optional<WavepacketConfig> wavepacket;
};

struct SweepConfig {
    std::string parameter;
    std::vector<double> values;
    std::string command = "defect";
    std::string domain = "photonic";
};

struct RunConfig {
    json raw;
    std::optional<GeometryConfig> geometry;
    std::optional<PhotonicMaterial> photonic;
    std::optional<ElasticMaterial> elastic;
    SolverConfig solver;
    std::optional<WaveguideConfig> defect;
    std::optional<CavityConfig> heterostructure;
    std::optional<CascadeConfig> cascade;
    std::optional<SweepConfig> sweep;
};

namespace config_detail {

/// Reads typed keys from one object and rejects anything left unread.
class Block {
public:
    Block(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("block '" + name_ + "' must be an object");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("'" + name_ + "." + key + "' has the wrong type");
        }
    }

    template <class T>
    void get_opt(const std::string& key, std::optional<T>& out) {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return;
        T v{};
        get(key, v);
        out = v;
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }
    [[nodiscard]] const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key '" + name_ + "." + k + "'");
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

inline double positive(double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
    return v;
}

inline int at_least(int v, int lo, const std::string& what) {
    if (v < lo) throw ConfigError(what + " must be at least " + std::to_string(lo));
    return v;
}

inline GeometryConfig parse_geometry(const json& j) {
    Block b(j, "geometry");
    GeometryConfig g;
    double orientation_deg = 0.0;
    std::string axes = "full";
    b.get("a_nm", g.a_nm);
    b.get("d_over_a", g.d_over_a);
    b.get("A_over_a", g.hole.A);
    b.get("B_over_a", g.hole.B);
    b.get("L_over_a", g.hole.L);
    b.get("orientation_deg", orientation_deg);
    b.get("axes", axes);
    b.get("resolution", g.resolution);
    b.finish();
    positive(g.a_nm, "geometry.a_nm");
    positive(g.d_over_a, "geometry.d_over_a");
    if (axes == "full") g.hole.axes = AxisConvention::full;
    else if (axes == "semi") g.hole.axes = AxisConvention::semi;
    else throw ConfigError("geometry.axes must be 'full' or 'semi'");
    g.hole.orientation = orientation_deg * kPi / 180.0;
    at_least(g.resolution, 16, "geometry.resolution");
    try {
        g.hole.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }
    return g;
}

inline PhotonicMaterial parse_photonic(const json& j) {
    Block b(j, "photonic");
    PhotonicMaterial m;
    b.get("n_bulk", m.n_bulk);
    b.get("target_wavelength_nm", m.target_wavelength_nm);
    b.get_opt("n_eff", m.n_eff_override);
    b.finish();
    return m;
}

inline ElasticMaterial parse_elastic(const json& j) {
    Block b(j, "elastic");
    ElasticMaterial m;
    double c11 = m.c11 / 1e9, c12 = m.c12 / 1e9, c44 = m.c44 / 1e9, rot = 0.0;
    b.get("c11_GPa", c11);
    b.get("c12_GPa", c12);
    b.get("c44_GPa", c44);
    b.get("rho_kg_m3", m.rho);
    b.get("axis_rotation_deg", rot);
    b.get("filler_stiffness", m.filler_stiffness);
    b.get("filler_density", m.filler_density);
    b.finish();
    m.c11 = c11 * 1e9;
    m.c12 = c12 * 1e9;
    m.c44 = c44 * 1e9;
    m.axis_rotation = rot * kPi / 180.0;
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("elastic: ") + e.what());
    }
    return m;
}

inline SolverConfig parse_solver(const json& j, std::optional<int>& resolution) {
    Block b(j, "solver");
    SolverConfig s;
    b.get("cutoff", s.cutoff);
    b.get("n_bands", s.n_bands);
    b.get("samples_per_segment", s.samples_per_segment);
    b.get("full_zone_grid", s.full_zone_grid);
    b.get_opt("resolution", resolution);
    b.finish();
    at_least(s.cutoff, 1, "solver.cutoff");
    at_least(s.n_bands, 1, "solver.n_bands");
    at_least(s.samples_per_segment, 2, "solver.samples_per_segment");
    at_least(s.full_zone_grid, 0, "solver.full_zone_grid");
    return s;
}

inline WaveguideConfig parse_defect(const json& j) {
    Block b(j, "defect");
    WaveguideConfig w;
    std::string kind = "removed_row_W";
    b.get("kind", kind);
    b.get("W", w.spec.W);
    b.get("circle_radius_over_a", w.spec.circle_radius);
    b.get("n_transverse", w.n_transverse);
    b.get("cutoff", w.cutoff);
    b.get("resolution", w.resolution);
    b.get("n_bands", w.n_bands);
    b.get("kx_samples", w.kx_samples);
    b.get("threshold", w.threshold);
    b.finish();
    if (kind == "removed_row_W") w.spec.kind = DefectKind::removed_row_W;
    else if (kind == "circular_hole_row") w.spec.kind = DefectKind::circular_hole_row;
    else throw ConfigError("defect.kind must be 'removed_row_W' or 'circular_hole_row'");
    try {
        w.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("defect: ") + e.what());
    }
    if (w.n_transverse < 5 || w.n_transverse % 2 == 0) throw ConfigError("defect.n_transverse must be odd and >= 5");
    at_least(w.cutoff, 1, "defect.cutoff");
    at_least(w.resolution, 16, "defect.resolution");
    at_least(w.n_bands, 0, "defect.n_bands");
    at_least(w.kx_samples, 2, "defect.kx_samples");
    if (!(w.threshold > 0.0 && w.threshold < 1.0)) throw ConfigError("defect.threshold must lie in (0, 1)");
    return w;
}

inline CavityConfig parse_heterostructure(const json& j) {
    Block b(j, "heterostructure");
    CavityConfig c;
    b.get("mirror_W", c.spec.mirror_W);
    b.get("core_W", c.spec.core_W);
    b.get("core_periods", c.spec.core_periods);
    b.get("mirror_periods", c.spec.mirror_periods);
    b.get("access_periods", c.spec.access_periods);
    b.get("n_transverse", c.spec.n_transverse);
    b.get("gmax_over_2pi", c.gmax_over_2pi);
    b.get("per_a", c.per_a);
    b.get("n_modes", c.n_modes);
    b.get("resolution", c.resolution);
    b.finish();
    try {
        c.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("heterostructure: ") + e.what());
    }
    positive(c.gmax_over_2pi, "heterostructure.gmax_over_2pi");
    at_least(c.per_a, 8, "heterostructure.per_a");
    at_least(c.n_modes, 1, "heterostructure.n_modes");
    at_least(c.resolution, 16, "heterostructure.resolution");
    return c;
}

inline CascadeConfig parse_cascade(const json& j) {
    Block b(j, "cascade");
    CascadeConfig c;
    EmitterRates ghz;
    b.get("g12_GHz", ghz.g12);
    b.get("g13_GHz", ghz.g13);
    b.get("g23_GHz", ghz.g23);
    b.get("kappa_eo_GHz", ghz.kappa_eo);
    b.get("kappa_em_GHz", ghz.kappa_em);
    b.get("kappa_io_GHz", ghz.kappa_io);
    b.get("kappa_im_GHz", ghz.kappa_im);
    b.get("gamma3_GHz", ghz.gamma3);
    b.get("gamma2_GHz", ghz.gamma2);
    b.get("regime_factor", c.regime_factor);
    std::vector<double> range{c.delta_range_linewidths.first, c.delta_range_linewidths.second};
    b.get("delta_range_linewidths", range);
    b.get("n_samples", c.n_samples);
    b.get("beta_values", c.beta_values);
    if (b.has("wavepacket")) {
        Block w(b.at("wavepacket"), "cascade.wavepacket");
        WavepacketConfig wp;
        std::string shape = "lorentzian";
        w.get("shape", shape);
        w.get("center_GHz", wp.center_GHz);
        w.get("width_GHz", wp.width_GHz);
        w.finish();
        if (shape == "lorentzian") wp.shape = SpectralShape::lorentzian;
        else if (shape == "gaussian") wp.shape = SpectralShape::gaussian;
        else throw ConfigError("cascade.wavepacket.shape must be 'lorentzian' or 'gaussian'");
        positive(wp.width_GHz, "cascade.wavepacket.width_GHz");
        c.wavepacket = wp;
    }
    b.finish();
    const double s = 2.0 * kPi;
    c.rates = {ghz.g12 * s, ghz.g13 * s, ghz.g23 * s, ghz.kappa_eo * s, ghz.kappa_em * s,
               ghz.kappa_io * s, ghz.kappa_im * s, ghz.gamma3 * s, ghz.gamma2 * s};
    try {
        c.rates.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("cascade: ") + e.what());
    }
    if (range.size() != 2 || !(range[1] > range[0])) throw ConfigError("cascade.delta_range_linewidths must be [lo, hi] with lo < hi");
    c.delta_range_linewidths = {range[0], range[1]};
    at_least(c.n_samples, 2, "cascade.n_samples");
    positive(c.regime_factor, "cascade.regime_factor");
    for (double beta : c.beta_values)
        if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("cascade.beta_values must lie in (0, 1]");
    return c;
}

inline SweepConfig parse_sweep(const json& j) {
    Block b(j, "sweep");
    SweepConfig s;
    b.get("parameter", s.parameter);
    b.get("values", s.values);
    b.get("command", s.command);
    b.get("domain", s.domain);
    b.finish();
    if (s.command != "bands" && s.command != "defect" && s.command != "cascade")
        throw ConfigError("sweep.command must be 'bands', 'defect' or 'cascade'");
    if (s.domain != "photonic" && s.domain != "phononic") throw ConfigError("sweep.domain must be 'photonic' or 'phononic'");
    return s;
}

}  // namespace config_detail

inline RunConfig parse_config(const json& j) {
    using namespace config_detail;
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    static const std::set<std::string> known{"geometry", "photonic", "elastic", "solver", "defect", "heterostructure", "cascade", "sweep"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("unknown block '" + k + "'");
    RunConfig rc;
    rc.raw = j;
    if (j.contains("geometry")) rc.geometry = parse_geometry(j["geometry"]);
    if (j.contains("photonic")) rc.photonic = parse_photonic(j["photonic"]);
    if (j.contains("elastic")) rc.elastic = parse_elastic(j["elastic"]);
    if (j.contains("solver")) {
        std::optional<int> res;
        rc.solver = parse_solver(j["solver"], res);
        if (res) {
            if (rc.geometry && j["geometry"].contains("resolution") && rc.geometry->resolution != *res)
                throw ConfigError("solver.resolution conflicts with geometry.resolution");
            if (rc.geometry) rc.geometry->resolution = at_least(*res, 16, "solver.resolution");
        }
    }
    if (rc.photonic && rc.geometry) rc.photonic->d_over_a = rc.geometry->d_over_a;
    if (rc.photonic) {
        try {
            rc.photonic->validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("photonic: ") + e.what());
        }
    }
    if (j.contains("defect")) rc.defect = parse_defect(j["defect"]);
    if (j.contains("heterostructure")) rc.heterostructure = parse_heterostructure(j["heterostructure"]);
    if (j.contains("cascade")) rc.cascade = parse_cascade(j["cascade"]);
    if (j.contains("sweep")) rc.sweep = parse_sweep(j["sweep"]);
    return rc;
}

inline json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

inline RunConfig load_config(const std::filesystem::path& file) { return parse_config(read_json_file(file)); }

/**
 * @brief Returns a copy of j with the dotted path set to value.
 *
 * The path must name an existing numeric key or a known key of an existing block.
 */
inline json set_path(const json& j, const std::string& path, double value) {
    json out = j;
    json* node = &out;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty() || !node->is_object()) throw ConfigError("cannot resolve parameter path '" + path + "'");
        if (dot == std::string::npos) {
            if (node->contains(key) && !(*node)[key].is_number()) throw ConfigError("parameter '" + path + "' is not numeric");
            const bool integral = node->contains(key) ? (*node)[key].is_number_integer() : false;
            if (integral) {
                if (value != std::floor(value)) throw ConfigError("parameter '" + path + "' needs integer values");
                (*node)[key] = static_cast<long long>(value);
            } else {
                (*node)[key] = value;
            }
            break;
        }
        if (!node->contains(key)) throw ConfigError("cannot resolve parameter path '" + path + "'");
        node = &(*node)[key];
        start = dot + 1;
    }
    parse_config(out);  // rejects unknown keys introduced by the path
    return out;
}

}  // namespace shamrock
