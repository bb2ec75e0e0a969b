/**
 * @file symmetry.hpp
 * @brief Point groups of the hexagonal lattice, the Gamma-M-K-Gamma path and
 *        spectrum comparison checks.
 */
#pragma once

#include "geometry.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

namespace shamrock {

struct Mat2 {
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
                a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
    }
    friend Vec2 operator*(const Mat2& a, Vec2 v) { return {a.m00 * v.x + a.m01 * v.y, a.m10 * v.x + a.m11 * v.y}; }
    [[nodiscard]] double operator()(int i, int j) const { return i == 0 ? (j == 0 ? m00 : m01) : (j == 0 ? m10 : m11); }
    [[nodiscard]] double det() const { return m00 * m11 - m01 * m10; }
    [[nodiscard]] Mat2 transpose() const { return {m00, m10, m01, m11}; }
    [[nodiscard]] double distance(const Mat2& o) const {
        return std::max({std::abs(m00 - o.m00), std::abs(m01 - o.m01), std::abs(m10 - o.m10), std::abs(m11 - o.m11)});
    }
};

inline Mat2 rotation_matrix(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c, -s, s, c};
}

/// Reflection across the line through the origin at the given angle.
inline Mat2 mirror_matrix(double line_angle) {
    const double c = std::cos(2.0 * line_angle), s = std::sin(2.0 * line_angle);
    return {c, s, s, -c};
}

struct PointOp {
    Mat2 matrix;
    std::string label;
};

enum class SpaceGroup { p3m1, p6mm };

inline SpaceGroup parse_space_group(const std::string& s) {
    if (s == "p3m1") return SpaceGroup::p3m1;
    if (s == "p6mm") return SpaceGroup::p6mm;
    throw std::invalid_argument("unknown space group '" + s + "'");
}

/**
 * p3m1: E, C3, C3^2 and mirrors along 30, 90 and 150 degrees (the lobe axes of
 * an orientation-0 shamrock). p6mm adds the six-fold rotations, inversion and
 * the mirrors along 0, 60 and 120 degrees.
 */
inline std::vector<PointOp> point_group(SpaceGroup g) {
    std::vector<PointOp> ops{
        {rotation_matrix(0.0), "E"},
        {rotation_matrix(2.0 * kPi / 3.0), "C3"},
        {rotation_matrix(4.0 * kPi / 3.0), "C3^2"},
        {mirror_matrix(kPi / 6.0), "sigma1"},
        {mirror_matrix(kPi / 2.0), "sigma2"},
        {mirror_matrix(5.0 * kPi / 6.0), "sigma3"},
    };
    if (g == SpaceGroup::p6mm) {
        ops.push_back({rotation_matrix(kPi / 3.0), "C6"});
        ops.push_back({rotation_matrix(kPi), "inversion"});
        ops.push_back({rotation_matrix(5.0 * kPi / 3.0), "C6^5"});
        ops.push_back({mirror_matrix(0.0), "sigma4"});
        ops.push_back({mirror_matrix(kPi / 3.0), "sigma5"});
        ops.push_back({mirror_matrix(2.0 * kPi / 3.0), "sigma6"});
    }
    return ops;
}

/// Index of the group element equal to m, or -1.
inline int find_op(const std::vector<PointOp>& ops, const Mat2& m, double tol = 1e-12) {
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].matrix.distance(m) < tol) return static_cast<int>(i);
    return -1;
}

inline PointOp compose(const PointOp& a, const PointOp& b) { return {a.matrix * b.matrix, a.label + "*" + b.label}; }

/**
 * Operations of `group` that map the sampled primitive cell onto itself, node
 * for node. Needs n1 == n2 so every lattice operation permutes the nodes.
 */
inline std::vector<PointOp> cell_symmetries(const UnitCellGeometry& cell, const std::vector<PointOp>& group,
                                            double tol = 1e-9) {
    if (cell.layout || cell.n1 != cell.n2) throw std::invalid_argument("cell_symmetries needs a primitive cell");
    const int n = cell.n1;
    const auto B = reciprocal_vectors(cell.A1, cell.A2);
    std::vector<PointOp> kept;
    for (const auto& op : group) {
        // integer matrix of op in the (A1, A2) basis
        int p[2][2];
        bool lattice_op = true;
        const Vec2 img[2] = {op.matrix * cell.A1, op.matrix * cell.A2};
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 2; ++r) {
                const double v = dot(img[c], B[r]) / (2.0 * kPi);
                p[r][c] = static_cast<int>(std::lround(v));
                if (std::abs(v - p[r][c]) > 1e-9) lattice_op = false;
            }
        if (!lattice_op) continue;
        double dev = 0.0;
        for (int i = 0; i < n && dev <= tol; ++i)
            for (int j = 0; j < n; ++j) {
                const int i2 = ((p[0][0] * i + p[0][1] * j) % n + n) % n;
                const int j2 = ((p[1][0] * i + p[1][1] * j) % n + n) % n;
                dev = std::max(dev, std::abs(cell.at(i, j) - cell.at(i2, j2)));
            }
        if (dev <= tol) kept.push_back(op);
    }
    return kept;
}

/**
 * Images of the Gamma-M-K-Gamma path needed when only `kept` (plus time
 * reversal) are symmetries of the spectrum: one p6mm coset representative per
 * coset of kept x {E, -E}. The identity comes first.
 */
inline std::vector<Mat2> path_images(const std::vector<PointOp>& kept) {
    std::vector<PointOp> h = kept;
    for (const auto& op : kept) h.push_back({rotation_matrix(kPi) * op.matrix, op.label + "*T"});
    std::vector<Mat2> reps;
    for (const auto& g : point_group(SpaceGroup::p6mm)) {
        bool covered = false;
        for (const auto& r : reps)
            if (find_op(h, r.transpose() * g.matrix, 1e-9) >= 0) covered = true;
        if (!covered) reps.push_back(g.matrix);
    }
    return reps;
}

struct KVertex {
    std::string label;
    Vec2 frac;  ///< coordinates in the reciprocal basis
    Vec2 k;     ///< Cartesian, radians per a
};

struct KSample {
    Vec2 k;
    double path_length = 0.0;
    std::string label;
};

struct KPath {
    std::vector<KVertex> vertices;
    std::vector<KSample> samples;
    int samples_per_segment = 0;

    [[nodiscard]] std::size_t size() const { return samples.size(); }
};

/// Gamma -> M -> K -> Gamma with M = b2/2 and K = (b1 + 2 b2)/3.
inline KPath irbz_path(const LatticeSpec& lattice, int samples_per_segment) {
    if (samples_per_segment < 2) throw std::invalid_argument("samples_per_segment must be at least 2");
    const auto b = reciprocal_basis(lattice);
    auto cart = [&](Vec2 f) { return f.x * b[0] + f.y * b[1]; };
    KPath p;
    p.samples_per_segment = samples_per_segment;
    p.vertices = {{"G", {0.0, 0.0}, {}}, {"M", {0.0, 0.5}, {}}, {"K", {1.0 / 3.0, 2.0 / 3.0}, {}}, {"G", {0.0, 0.0}, {}}};
    for (auto& v : p.vertices) v.k = cart(v.frac);
    double len = 0.0;
    Vec2 prev = p.vertices[0].k;
    for (std::size_t s = 0; s + 1 < p.vertices.size(); ++s) {
        const Vec2 k0 = p.vertices[s].k, k1 = p.vertices[s + 1].k;
        for (int t = 0; t < samples_per_segment; ++t) {
            const Vec2 k = k0 + (static_cast<double>(t) / samples_per_segment) * (k1 - k0);
            len += norm(k - prev);
            prev = k;
            p.samples.push_back({k, len, t == 0 ? p.vertices[s].label : ""});
        }
    }
    len += norm(p.vertices.back().k - prev);
    p.samples.push_back({p.vertices.back().k, len, p.vertices.back().label});
    return p;
}

/// Path images for a spectrum with the full symmetry of the cell.
inline std::vector<Mat2> cell_path_images(const UnitCellGeometry& cell) {
    return path_images(cell_symmetries(cell, point_group(SpaceGroup::p6mm)));
}

/// The path followed by its images; image r gets r primes on its vertex labels.
inline KPath extended_path(const LatticeSpec& lattice, const KPath& path, const std::vector<Mat2>& images) {
    if (images.empty()) throw std::invalid_argument("at least one image is needed");
    KPath out;
    out.samples_per_segment = path.samples_per_segment;
    double offset = 0.0;
    for (std::size_t r = 0; r < images.size(); ++r) {
        const std::string primes(r, '\'');
        auto relabel = [&](std::string& l) {
            if (!l.empty() && l != "G") l += primes;
        };
        // each image starts at Gamma, where the previous one ended
        for (std::size_t i = (r == 0 ? 0 : 1); i < path.vertices.size(); ++i) {
            auto v = path.vertices[i];
            v.k = images[r] * v.k;
            v.frac = {dot(v.k, lattice.a1) / (2.0 * kPi), dot(v.k, lattice.a2) / (2.0 * kPi)};
            relabel(v.label);
            out.vertices.push_back(v);
        }
        for (std::size_t i = (r == 0 ? 0 : 1); i < path.samples.size(); ++i) {
            auto smp = path.samples[i];
            smp.k = images[r] * smp.k;
            smp.path_length += offset;
            relabel(smp.label);
            out.samples.push_back(smp);
        }
        offset = out.samples.back().path_length;
    }
    return out;
}

/// KPath from explicit Cartesian points, path length accumulated along them.
inline KPath kpath_from_points(const std::vector<Vec2>& ks) {
    KPath p;
    double len = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i > 0) len += norm(ks[i] - ks[i - 1]);
        p.samples.push_back({ks[i], len, ""});
    }
    return p;
}

/// n x n Monkhorst-style grid over the full zone, fractional coordinates (i/n, j/n).
inline std::vector<Vec2> zone_grid(const LatticeSpec& lattice, int n) {
    const auto b = reciprocal_basis(lattice);
    std::vector<Vec2> ks;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ks.push_back((static_cast<double>(i) / n) * b[0] + (static_cast<double>(j) / n) * b[1]);
    return ks;
}

struct SpectrumComparison {
    std::vector<double> deviations;  ///< relative deviation per band
    double max_deviation = 0.0;
    int worst_band = -1;
    double tol = 0.0;
    bool passed = true;
};

/**
 * @brief Relative per-band deviation between two spectra.
 *
 * The denominator is max(|a|, |b|) floored at 1e-12 of the largest magnitude so
 * that bands at zero frequency compare by absolute value.
 */
inline SpectrumComparison check_time_reversal(const std::vector<double>& at_k, const std::vector<double>& at_minus_k,
                                              double tol) {
    if (at_k.size() != at_minus_k.size()) throw std::invalid_argument("band lists differ in length");
    SpectrumComparison r;
    r.tol = tol;
    double scale = 0.0;
    for (std::size_t i = 0; i < at_k.size(); ++i) scale = std::max({scale, std::abs(at_k[i]), std::abs(at_minus_k[i])});
    const double floor = std::max(scale * 1e-12, 1e-300);
    for (std::size_t i = 0; i < at_k.size(); ++i) {
        const double den = std::max({std::abs(at_k[i]), std::abs(at_minus_k[i]), floor});
        const double dev = std::abs(at_k[i] - at_minus_k[i]) / den;
        r.deviations.push_back(dev);
        if (r.worst_band < 0 || dev > r.max_deviation) {
            r.worst_band = static_cast<int>(i);
            r.max_deviation = dev;
        }
    }
    r.passed = r.max_deviation <= tol;
    return r;
}

/// Same comparison for a point-group image R k.
inline SpectrumComparison compare_spectra(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    return check_time_reversal(a, b, tol);
}

inline void write_kpath_csv(const KPath& path, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "index,kx,ky,path_length,label\n" << std::setprecision(12);
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const auto& s = path.samples[i];
        out << i << ',' << s.k.x << ',' << s.k.y << ',' << s.path_length << ',' << s.label << '\n';
    }
}

}  // namespace shamrock
