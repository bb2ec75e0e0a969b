/**
 * @file geometry.hpp
 * @brief Shamrock lattice, hole shapes, rasterized indicator fields and their
 *        Fourier coefficients.
 *
 * Lengths inside a cell are in units of the lattice constant a. Reciprocal
 * vectors are in radians per a.
 */
#pragma once

#include "numerics.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shamrock {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt3 = 1.7320508075688772935;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

/// Hexagonal lattice; a and d in meters, basis vectors in units of a.
struct LatticeSpec {
    double a = 300e-9;
    double d = 0.65 * 300e-9;
    Vec2 a1{1.0, 0.0};
    Vec2 a2{0.5, kSqrt3 / 2.0};

    static LatticeSpec hexagonal(double a_m, double d_over_a) {
        LatticeSpec l;
        l.a = a_m;
        l.d = d_over_a * a_m;
        return l;
    }

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("lattice constant a must be positive");
        if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("membrane thickness d must be positive");
        const double n1 = norm(a1), n2 = norm(a2);
        if (std::abs(n1 - 1.0) > 1e-12 || std::abs(n2 - 1.0) > 1e-12)
            throw std::invalid_argument("basis vectors must have unit length (units of a)");
        if (std::abs(dot(a1, a2) - 0.5) > 1e-12) throw std::invalid_argument("basis vectors must be 60 degrees apart");
    }
};

enum class AxisConvention { full, semi };

/**
 * Three ellipses rotated by 2pi/3, each shifted outward by L along its major
 * axis. Lobe i points along pi/2 + orientation + 2 pi i/3. A = B = L = 0 is
 * the empty hole.
 */
struct ShamrockHole {
    double A = 0.45;
    double B = 0.6;
    double L = 0.17;
    double orientation = 0.0;
    AxisConvention axes = AxisConvention::full;

    [[nodiscard]] double semi_minor() const { return axes == AxisConvention::full ? 0.5 * A : A; }
    [[nodiscard]] double semi_major() const { return axes == AxisConvention::full ? 0.5 * B : B; }
    [[nodiscard]] bool empty() const { return A == 0.0 && B == 0.0 && L == 0.0; }
    /// Largest distance of a hole point from the hole center.
    [[nodiscard]] double extent() const { return empty() ? 0.0 : L + semi_major(); }

    void validate() const {
        if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(L) || !std::isfinite(orientation))
            throw std::invalid_argument("hole parameters must be finite");
        if (empty()) return;
        if (!(A > 0.0) || !(A <= B)) throw std::invalid_argument("hole requires 0 < A <= B");
        if (L < 0.0) throw std::invalid_argument("hole requires L >= 0");
        if (!(extent() < 0.5))
            throw std::invalid_argument("hole extent " + std::to_string(extent()) +
                                        " a reaches the neighbouring cell (must stay below a/2)");
    }
};

struct CircleHole {
    double radius = 0.3;
    void validate() const {
        if (!(radius > 0.0 && radius < 0.5)) throw std::invalid_argument("circle radius must lie in (0, 0.5)");
    }
};

inline bool point_in_shamrock(const ShamrockHole& hole, Vec2 p, Vec2 center) {
    if (hole.empty()) return false;
    const double sa = hole.semi_minor();
    const double sb = hole.semi_major();
    const Vec2 d = p - center;
    if (dot(d, d) > (hole.L + sb) * (hole.L + sb)) return false;
    for (int i = 0; i < 3; ++i) {
        const double th = kPi / 2.0 + hole.orientation + 2.0 * kPi * i / 3.0;
        const double c = std::cos(th), s = std::sin(th);
        const double u = d.x * c + d.y * s - hole.L;
        const double v = -d.x * s + d.y * c;
        if ((u / sb) * (u / sb) + (v / sa) * (v / sa) <= 1.0) return true;
    }
    return false;
}

inline bool point_in_circle(const CircleHole& h, Vec2 p, Vec2 center) {
    const Vec2 d = p - center;
    return dot(d, d) <= h.radius * h.radius;
}

using HoleShape = std::variant<ShamrockHole, CircleHole>;

struct HoleSite {
    Vec2 center;
    HoleShape shape;
};

inline double shape_extent(const HoleShape& s) {
    return std::visit([](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, ShamrockHole>) return h.extent();
        else return h.radius;
    }, s);
}

inline bool point_in_shape(const HoleShape& s, Vec2 p, Vec2 center) {
    return std::visit([&](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, ShamrockHole>) return point_in_shamrock(h, p, center);
        else return point_in_circle(h, p, center);
    }, s);
}

/// Reciprocal pair with b_i . a_j = 2 pi delta_ij.
inline std::array<Vec2, 2> reciprocal_vectors(Vec2 a1, Vec2 a2) {
    const double det = cross(a1, a2);
    if (std::abs(det) < 1e-300) throw std::invalid_argument("degenerate cell vectors");
    const double f = 2.0 * kPi / det;
    return {Vec2{a2.y * f, -a2.x * f}, Vec2{-a1.y * f, a1.x * f}};
}

inline std::array<Vec2, 2> reciprocal_basis(const LatticeSpec& lattice) {
    return reciprocal_vectors(lattice.a1, lattice.a2);
}

/// Metadata attached to supercells built by the defects module.
struct SupercellLayout {
    int n_transverse = 1;
    int periods = 1;                 ///< lattice periods along the guide axis
    double strip_half_width = 0.0;   ///< |y| bound of the guide strip (units of a)
    double x_center = 0.0;           ///< core center along the guide axis
    double core_half_length = 0.0;   ///< |x - x_center| bound of the cavity core
    bool has_defect = false;
    bool folded_tiling = false;      ///< exact tiling of the unit cell along a2
};

/**
 * Rasterized indicator chi on the nodes r_ij = (i/n1) A1 + (j/n2) A2, stored
 * row-major (i * n2 + j); chi = 1 is solid.
 */
struct UnitCellGeometry {
    LatticeSpec lattice;
    ShamrockHole hole;
    Vec2 A1{1.0, 0.0};
    Vec2 A2{0.5, kSqrt3 / 2.0};
    int resolution = 256;  ///< nodes per lattice constant along a1
    int n1 = 256;
    int n2 = 256;
    std::vector<double> chi;
    double fill_fraction = 1.0;
    std::vector<HoleSite> sites;
    std::optional<SupercellLayout> layout;

    [[nodiscard]] double at(int i, int j) const { return chi[static_cast<std::size_t>(i) * n2 + j]; }
    [[nodiscard]] Vec2 node(int i, int j) const {
        return (static_cast<double>(i) / n1) * A1 + (static_cast<double>(j) / n2) * A2;
    }
    [[nodiscard]] double area() const { return std::abs(cross(A1, A2)); }
};

/**
 * Anti-aliasing stencil: a 4x4 grid over the pixel rhombus spanned by a1/res
 * and a2/res, centered on the node, repeated for the three 120-degree rotations.
 * The union has the full hexagonal point symmetry, so symmetric shapes give
 * symmetric grids.
 */
inline std::vector<Vec2> aa_stencil(int resolution) {
    const LatticeSpec hex;
    const Vec2 d1 = (1.0 / resolution) * hex.a1;
    const Vec2 d2 = (1.0 / resolution) * hex.a2;
    std::vector<Vec2> pts;
    pts.reserve(48);
    for (int r = 0; r < 3; ++r)
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) {
                const Vec2 o = ((p + 0.5) / 4.0 - 0.5) * d1 + ((q + 0.5) / 4.0 - 0.5) * d2;
                pts.push_back(rotate(o, 2.0 * kPi * r / 3.0));
            }
    return pts;
}

/**
 * @brief Rasterize periodic hole sites on an n1 x n2 node grid of the cell (A1, A2).
 *
 * Each site only touches nodes within its bounding circle; periodic images are
 * handled by wrapping node indices.
 */
inline std::vector<double> rasterize(Vec2 A1, Vec2 A2, int n1, int n2, const std::vector<HoleSite>& sites,
                                     int resolution) {
    const auto stencil = aa_stencil(resolution);
    const auto S = static_cast<int>(stencil.size());
    double srad = 0.0;
    for (auto s : stencil) srad = std::max(srad, norm(s));
    std::vector<std::uint64_t> mask(static_cast<std::size_t>(n1) * n2, 0);
    const auto B = reciprocal_vectors(A1, A2);
    for (const auto& site : sites) {
        const double ext = shape_extent(site.shape);
        if (ext <= 0.0) continue;
        const double R = ext + srad + 1e-12;
        const double uc = dot(site.center, B[0]) / (2.0 * kPi);
        const double vc = dot(site.center, B[1]) / (2.0 * kPi);
        const double du = R * norm(B[0]) / (2.0 * kPi);
        const double dv = R * norm(B[1]) / (2.0 * kPi);
        const auto i0 = static_cast<long long>(std::floor((uc - du) * n1));
        const auto i1 = static_cast<long long>(std::ceil((uc + du) * n1));
        const auto j0 = static_cast<long long>(std::floor((vc - dv) * n2));
        const auto j1 = static_cast<long long>(std::ceil((vc + dv) * n2));
        for (long long i = i0; i <= i1; ++i) {
            for (long long j = j0; j <= j1; ++j) {
                const Vec2 r = (static_cast<double>(i) / n1) * A1 + (static_cast<double>(j) / n2) * A2;
                const Vec2 d = r - site.center;
                if (dot(d, d) > R * R) continue;
                std::uint64_t bits = 0;
                for (int s = 0; s < S; ++s)
                    if (point_in_shape(site.shape, r + stencil[s], site.center)) bits |= (std::uint64_t{1} << s);
                mask[static_cast<std::size_t>(wrap_index(i, n1)) * n2 + wrap_index(j, n2)] |= bits;
            }
        }
    }
    std::vector<double> chi(mask.size());
    for (std::size_t t = 0; t < mask.size(); ++t) chi[t] = 1.0 - static_cast<double>(std::popcount(mask[t])) / S;
    return chi;
}

inline double grid_mean(const std::vector<double>& g) {
    double s = 0.0;
    for (double v : g) s += v;
    return g.empty() ? 0.0 : s / static_cast<double>(g.size());
}

/**
 * @brief Primitive cell with one shamrock hole centered at the origin node.
 * @throws std::invalid_argument for resolution < 16 or holes reaching neighbours.
 */
inline UnitCellGeometry build_unit_cell(const LatticeSpec& lattice, const ShamrockHole& hole, int resolution) {
    lattice.validate();
    hole.validate();
    if (resolution < 16) throw std::invalid_argument("resolution must be at least 16");
    UnitCellGeometry g;
    g.lattice = lattice;
    g.hole = hole;
    g.A1 = lattice.a1;
    g.A2 = lattice.a2;
    g.resolution = resolution;
    g.n1 = resolution;
    g.n2 = resolution;
    if (!hole.empty()) g.sites.push_back({Vec2{0.0, 0.0}, hole});
    g.chi = rasterize(g.A1, g.A2, g.n1, g.n2, g.sites, resolution);
    g.fill_fraction = grid_mean(g.chi);
    return g;
}

/// Fourier coefficients c(m, n) of a real cell field for |m| <= k1, |n| <= k2.
struct FourierField {
    int k1 = 0;
    int k2 = 0;
    std::vector<cplx> coefficients;

    [[nodiscard]] int cutoff() const { return std::max(k1, k2); }
    [[nodiscard]] bool contains(int m, int n) const { return std::abs(m) <= k1 && std::abs(n) <= k2; }
    [[nodiscard]] cplx at(int m, int n) const {
        if (!contains(m, n)) throw std::out_of_range("Fourier index outside the stored cutoff");
        return coefficients[static_cast<std::size_t>(m + k1) * (2 * k2 + 1) + (n + k2)];
    }
};

/// Grid of solid * chi + hole * (1 - chi).
inline std::vector<double> mapped_grid(const UnitCellGeometry& cell, double solid, double hole) {
    std::vector<double> g(cell.chi.size());
    for (std::size_t t = 0; t < g.size(); ++t) g[t] = hole + (solid - hole) * cell.chi[t];
    return g;
}

inline FourierField fourier_coefficients(const UnitCellGeometry& cell, std::pair<double, double> values, int k1,
                                         int k2) {
    if (k1 < 1 || k2 < 1) throw std::invalid_argument("cutoff must be at least 1");
    if (!std::isfinite(values.first) || !std::isfinite(values.second))
        throw std::invalid_argument("mapped values must be finite");
    if (2 * k1 >= cell.n1 || 2 * k2 >= cell.n2)
        throw std::invalid_argument("cutoff exceeds the grid Nyquist limit (need 2*cutoff < grid size)");
    FourierField f;
    f.k1 = k1;
    f.k2 = k2;
    f.coefficients = dft2_real(mapped_grid(cell, values.first, values.second), cell.n1, cell.n2, k1, k2);
    return f;
}

inline FourierField fourier_coefficients(const UnitCellGeometry& cell, std::pair<double, double> values, int cutoff) {
    return fourier_coefficients(cell, values, cutoff, cutoff);
}

/// Binary PGM (P5) of chi in grid index space, 255 = solid.
inline void write_pgm(const UnitCellGeometry& cell, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "P5\n" << cell.n1 << ' ' << cell.n2 << "\n255\n";
    for (int j = cell.n2 - 1; j >= 0; --j)
        for (int i = 0; i < cell.n1; ++i)
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * cell.at(i, j)))));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace shamrock
