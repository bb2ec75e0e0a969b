/**
 * @file defects.hpp
 * @brief Line-defect waveguides and heterostructure cavities built from
 *        supercells, with mode localization measures.
 *
 * The guide runs along x (parallel to a1). Rows of holes are indexed by
 * j in [-h, h] with the defect row j = 0 on the line y = 0.
 */
#pragma once

#include "phononic.hpp"
#include "photonic.hpp"
#include "svg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shamrock {

enum class DefectKind { circular_hole_row, removed_row_W };

struct DefectSpec {
    DefectKind kind = DefectKind::removed_row_W;
    double W = 0.58;
    double circle_radius = 0.0;  ///< 0 selects the area-matched radius

    void validate() const {
        if (kind == DefectKind::removed_row_W && !(W > 0.0 && W <= 1.0)) throw std::invalid_argument("W must lie in (0, 1]");
        if (kind == DefectKind::circular_hole_row && circle_radius != 0.0 && !(circle_radius > 0.0 && circle_radius < 0.5))
            throw std::invalid_argument("circle_radius must lie in (0, 0.5)");
    }
};

struct HeterostructureSpec {
    double mirror_W = 0.52;
    double core_W = 0.58;
    int core_periods = 2;
    int mirror_periods = 4;
    int n_transverse = 5;
    int access_periods = 0;  ///< optional core_W guide between periodic images


    void validate() const {
        if (!(mirror_W > 0.0 && mirror_W <= 1.0) || !(core_W > 0.0 && core_W <= 1.0))
            throw std::invalid_argument("widths must lie in (0, 1]");
        if (mirror_W > core_W) throw std::invalid_argument("mirror_W must not exceed core_W");
        if (core_periods < 1) throw std::invalid_argument("core_periods must be at least 1");
        if (mirror_periods < 1) throw std::invalid_argument("mirror_periods must be at least 1");
        if (access_periods < 0) throw std::invalid_argument("access_periods must be non-negative");
        if (n_transverse < 5 || n_transverse % 2 == 0) throw std::invalid_argument("n_transverse must be odd and >= 5");
        // shifted rows must stay clear of rows +-2
        if ((core_W - mirror_W) * kSqrt3 / 2.0 > 0.5 * kSqrt3 / 2.0)
            throw std::invalid_argument("core_W - mirror_W too large for the row spacing");
    }
};

/// Circle radius with the same area as the shamrock hole of the cell.
inline double area_matched_radius(const UnitCellGeometry& cell) {
    return std::sqrt((1.0 - cell.fill_fraction) * cell.area() / kPi);
}

/// Half-width of the guide strip: midway between rows +-1 and +-2.
inline double strip_half_width(double row_shift) { return 0.75 * kSqrt3 - row_shift; }

/// True when two hole sites (including periodic images) share a point.
inline bool sites_overlap(Vec2 A1, Vec2 A2, const std::vector<HoleSite>& sites) {
    constexpr int kSamples = 160;
    for (std::size_t a = 0; a < sites.size(); ++a)
        for (std::size_t b = a; b < sites.size(); ++b)
            for (int p = -1; p <= 1; ++p)
                for (int q = -1; q <= 1; ++q) {
                    if (a == b && p == 0 && q == 0) continue;
                    const Vec2 cb = sites[b].center + static_cast<double>(p) * A1 + static_cast<double>(q) * A2;
                    const double ra = shape_extent(sites[a].shape), rb = shape_extent(sites[b].shape);
                    if (norm(cb - sites[a].center) >= ra + rb) continue;
                    for (int i = 0; i <= kSamples; ++i)
                        for (int j = 0; j <= kSamples; ++j) {
                            const Vec2 r = sites[a].center + Vec2{ra * (2.0 * i / kSamples - 1.0), ra * (2.0 * j / kSamples - 1.0)};
                            if (point_in_shape(sites[a].shape, r, sites[a].center) && point_in_shape(sites[b].shape, r, cb))
                                return true;
                        }
                }
    return false;
}

/**
 * @brief Guide supercell one period long and n_transverse rows wide.
 *
 * removed_row_W drops row 0 and pulls the remaining rows toward the axis so
 * that rows +-1 sit sqrt(3) W apart; circular_hole_row replaces row 0 by
 * circles. Without a defect the cell is an exact n_transverse-fold tiling of
 * the unit cell along a2 on the same node grid.
 */
inline UnitCellGeometry build_supercell(const UnitCellGeometry& cell, const std::optional<DefectSpec>& defect,
                                        int n_transverse) {
    if (n_transverse < 5 || n_transverse % 2 == 0) throw std::invalid_argument("n_transverse must be odd and >= 5");
    if (cell.layout) throw std::invalid_argument("build_supercell expects a primitive cell");
    if (defect) defect->validate();
    const int h = (n_transverse - 1) / 2;
    const bool removed = defect && defect->kind == DefectKind::removed_row_W;
    const bool circular = defect && defect->kind == DefectKind::circular_hole_row;
    const double sh = removed ? (1.0 - defect->W) * kSqrt3 / 2.0 : 0.0;
    double radius = 0.0;
    if (circular) {
        radius = defect->circle_radius > 0.0 ? defect->circle_radius : area_matched_radius(cell);
        CircleHole{radius}.validate();
    }

    UnitCellGeometry g;
    g.lattice = cell.lattice;
    g.hole = cell.hole;
    g.resolution = cell.resolution;
    g.A1 = cell.lattice.a1;
    g.A2 = defect ? Vec2{0.5 * n_transverse, n_transverse * kSqrt3 / 2.0 - 2.0 * sh}
                  : static_cast<double>(n_transverse) * cell.lattice.a2;
    g.n1 = cell.n1;
    g.n2 = cell.n2 * n_transverse;
    for (int j = -h; j <= h; ++j) {
        if (j == 0 && removed) continue;
        const Vec2 c = defect ? Vec2{0.5 * j, j * kSqrt3 / 2.0 - (j > 0 ? sh : (j < 0 ? -sh : 0.0))}
                              : static_cast<double>(j) * cell.lattice.a2;
        if (j == 0 && circular) g.sites.push_back({c, CircleHole{radius}});
        else if (!cell.hole.empty()) g.sites.push_back({c, cell.hole});
    }
    if (sites_overlap(g.A1, g.A2, g.sites)) throw std::invalid_argument("defect geometry makes neighbouring holes overlap");
    g.chi = rasterize(g.A1, g.A2, g.n1, g.n2, g.sites, g.resolution);
    g.fill_fraction = grid_mean(g.chi);
    SupercellLayout L;
    L.n_transverse = n_transverse;
    L.periods = 1;
    L.strip_half_width = strip_half_width(sh);
    L.has_defect = defect.has_value();
    L.folded_tiling = !defect.has_value();
    g.layout = L;
    return g;
}

/**
 * @brief Cavity supercell: mirror sections of width mirror_W around a core of
 *        width core_W, realized by moving rows +-1 outward over the core.
 *
 * The cell is Lc = 2 mirror_periods + core_periods + access_periods periods
 * long with the core centered on an integer x_c. A2.x = n_transverse / 2 puts
 * the transverse image of the core next to a mirror section. The mirror
 * x -> 2 x_c - x is broken only through that offset. The grid uses `per_a`
 * nodes per period in both directions.
 */
inline UnitCellGeometry build_cavity_supercell(const UnitCellGeometry& cell, const HeterostructureSpec& hs, int per_a) {
    hs.validate();
    if (per_a < 8) throw std::invalid_argument("cavity grid needs at least 8 nodes per period");
    const int nt = hs.n_transverse;
    const int h = (nt - 1) / 2;
    const int Lc = 2 * hs.mirror_periods + hs.core_periods + hs.access_periods;
    const double sh = (1.0 - hs.mirror_W) * kSqrt3 / 2.0;
    const double dc = (hs.core_W - hs.mirror_W) * kSqrt3 / 2.0;
    const double xc = std::floor(0.5 * Lc);
    UnitCellGeometry g;
    g.lattice = cell.lattice;
    g.hole = cell.hole;
    g.resolution = per_a;
    g.A1 = {static_cast<double>(Lc), 0.0};
    g.A2 = {0.5 * nt, nt * kSqrt3 / 2.0 - 2.0 * sh};
    g.n1 = per_a * Lc;
    g.n2 = per_a * nt;
    for (int j = -h; j <= h; ++j) {
        if (j == 0) continue;
        const double sgn = j > 0 ? 1.0 : -1.0;
        const double y = j * kSqrt3 / 2.0 - sgn * sh;
        for (int p = 0; p < Lc; ++p) {
            double x = 0.5 * j + p;
            x -= std::floor(x / Lc) * Lc;
            double yy = y;
            const double dx = std::abs(x - xc);
            const bool wide = dx < 0.5 * hs.core_periods - 1e-9 || dx > 0.5 * hs.core_periods + hs.mirror_periods - 1e-9;
            if (std::abs(j) == 1 && wide) yy += sgn * dc;
            if (!cell.hole.empty()) g.sites.push_back({Vec2{x, yy}, cell.hole});
        }
    }
    if (sites_overlap(g.A1, g.A2, g.sites)) throw std::invalid_argument("cavity geometry makes neighbouring holes overlap");
    g.chi = rasterize(g.A1, g.A2, g.n1, g.n2, g.sites, per_a);
    g.fill_fraction = grid_mean(g.chi);
    SupercellLayout L;
    L.n_transverse = nt;
    L.periods = Lc;
    L.strip_half_width = strip_half_width(sh);
    L.x_center = xc;
    L.core_half_length = 0.5 * hs.core_periods + 2.0;
    L.has_defect = true;
    g.layout = L;
    return g;
}

using DomainMaterial = std::variant<PhotonicMaterial, ElasticMaterial>;

inline bool is_elastic(const DomainMaterial& m) { return std::holds_alternative<ElasticMaterial>(m); }

/// Either solver, sharing one interface for defect calculations.
class DomainSolver {
public:
    DomainSolver(const UnitCellGeometry& cell, const DomainMaterial& material, PlaneWaveBasis basis) {
        if (const auto* pm = std::get_if<PhotonicMaterial>(&material)) {
            const auto idx = choose_index(*pm, cell.lattice.a, Polarization::TE);
            n_eff_ = idx.n_eff;
            unit_factor_ = thz_factor(cell.lattice.a);
            unit_ = "THz";
            photonic_.emplace(cell, idx.n_eff, std::move(basis), Polarization::TE);
            if (!cell.layout) images_ = cell_path_images(cell);
        } else {
            const auto& em = std::get<ElasticMaterial>(material);
            unit_factor_ = ghz_factor(em, cell.lattice.a);
            unit_ = "GHz";
            filler_density_ = em.filler_density;
            elastic_.emplace(cell, em, std::move(basis));
            if (!cell.layout) images_ = elastic_path_images(cell, em);
        }
    }

    [[nodiscard]] bool elastic() const { return elastic_.has_value(); }
    [[nodiscard]] const PlaneWaveBasis& basis() const { return elastic() ? elastic_->basis() : photonic_->basis(); }
    [[nodiscard]] double unit_factor() const { return unit_factor_; }
    [[nodiscard]] const std::string& unit() const { return unit_; }
    [[nodiscard]] double n_eff() const { return n_eff_; }
    [[nodiscard]] double filler_density() const { return filler_density_; }
    /// Images of the Gamma-M-K path that the spectrum needs (primitive cells only).
    [[nodiscard]] const std::vector<Mat2>& path_images() const { return images_; }

    [[nodiscard]] EigenResult modes(Vec2 k, int n) const { return elastic() ? elastic_->modes(k, n) : photonic_->modes(k, n); }
    [[nodiscard]] EigenResult modes_in_window(Vec2 k, double lo, double hi) const {
        return elastic() ? elastic_->modes_in_window(k, lo, hi) : photonic_->modes_in_window(k, lo, hi);
    }
    [[nodiscard]] std::vector<double> frequencies(Vec2 k, int n) const {
        return elastic() ? elastic_->frequencies(k, n) : photonic_->frequencies(k, n);
    }

private:
    std::optional<PhotonicSolver> photonic_;
    std::optional<ElasticSolver> elastic_;
    double unit_factor_ = 1.0;
    std::string unit_;
    double n_eff_ = 0.0;
    double filler_density_ = 1e-6;
    std::vector<Mat2> images_;
};

/// Node grid subsampled by `stride` for field evaluation.
struct FieldGrid {
    int stride = 1;
    int n1 = 0;
    int n2 = 0;
};

inline FieldGrid field_grid(const UnitCellGeometry& cell, int stride) {
    stride = std::max(1, stride);
    while (stride > 1 && (cell.n1 % stride != 0 || cell.n2 % stride != 0)) --stride;
    return {stride, cell.n1 / stride, cell.n2 / stride};
}

/**
 * @brief Field components of one mode on the field grid, scaled so that the
 *        energy density is the sum of their squared moduli.
 *
 * TE: D / sqrt(eps) with D from i (k+G) x z h_G. Elastic: sqrt(rho) u with the
 * filler density in holes. Not normalized.
 */
inline std::array<std::vector<cplx>, 2> mode_fields(const UnitCellGeometry& cell, const DomainSolver& solver, Vec2 k,
                                                    const CVector& v, const FieldGrid& fg) {
    const auto& basis = solver.basis();
    const auto n = static_cast<Eigen::Index>(basis.size());
    const std::size_t npts = static_cast<std::size_t>(fg.n1) * fg.n2;
    std::array<std::vector<cplx>, 2> f;
    std::vector<double> w(npts);
    if (solver.elastic()) {
        for (int c = 0; c < 2; ++c) f[c] = synthesize(basis.idx, v.data() + c * n, fg.n1, fg.n2);
        const double fd = solver.filler_density();
        for (std::size_t t = 0; t < npts; ++t) {
            const double x = cell.at(static_cast<int>(t / fg.n2) * fg.stride, static_cast<int>(t % fg.n2) * fg.stride);
            w[t] = std::sqrt(x + fd * (1.0 - x));
        }
    } else {
        std::vector<cplx> dx(static_cast<std::size_t>(n)), dy(static_cast<std::size_t>(n));
        for (Eigen::Index s = 0; s < n; ++s) {
            const Vec2 q = k + basis.g[s];
            // (q x z) = (q_y, -q_x)
            dx[s] = cplx{0.0, 1.0} * q.y * v[s];
            dy[s] = -cplx{0.0, 1.0} * q.x * v[s];
        }
        f[0] = synthesize(basis.idx, dx.data(), fg.n1, fg.n2);
        f[1] = synthesize(basis.idx, dy.data(), fg.n1, fg.n2);
        const double eps_s = solver.n_eff() * solver.n_eff();
        for (std::size_t t = 0; t < npts; ++t) {
            const double x = cell.at(static_cast<int>(t / fg.n2) * fg.stride, static_cast<int>(t % fg.n2) * fg.stride);
            w[t] = 1.0 / std::sqrt(1.0 + (eps_s - 1.0) * x);
        }
    }
    for (auto& c : f)
        for (std::size_t t = 0; t < npts; ++t) c[t] *= w[t];
    return f;
}

/// Energy density of one mode on the field grid, normalized to unit sum.
inline std::vector<double> energy_density(const UnitCellGeometry& cell, const DomainSolver& solver, Vec2 k,
                                          const CVector& v, const FieldGrid& fg) {
    const auto f = mode_fields(cell, solver, k, v, fg);
    std::vector<double> e(f[0].size());
    double s = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        e[t] = std::norm(f[0][t]) + std::norm(f[1][t]);
        s += e[t];
    }
    if (s > 0.0)
        for (double& x : e) x /= s;
    return e;
}

/// y of a field-grid node folded into [-A2.y/2, A2.y/2).
inline double folded_y(const UnitCellGeometry& cell, const FieldGrid& fg, int j) {
    double y = (static_cast<double>(j) / fg.n2) * cell.A2.y;
    y -= std::round(y / cell.A2.y) * cell.A2.y;
    return y;
}

/// x - x_center of a field-grid node folded into one supercell period. The
/// node is first moved by the same multiple of A2 as in folded_y.
inline double folded_dx(const UnitCellGeometry& cell, const FieldGrid& fg, int i, int j, double x_center) {
    const double t = static_cast<double>(j) / fg.n2;
    const double x = (static_cast<double>(i) / fg.n1) * cell.A1.x + (t - std::round(t)) * cell.A2.x;
    double dx = x - x_center;
    dx -= std::round(dx / cell.A1.x) * cell.A1.x;
    return dx;
}

/// Fraction of a normalized energy grid inside |y| <= half_width (and |dx| <= half_length when given).
inline double region_fraction(const UnitCellGeometry& cell, const FieldGrid& fg, const std::vector<double>& e,
                              double half_width, std::optional<double> half_length = std::nullopt, double x_center = 0.0) {
    double in = 0.0, tot = 0.0;
    for (int i = 0; i < fg.n1; ++i)
        for (int j = 0; j < fg.n2; ++j) {
            const double w = e[static_cast<std::size_t>(i) * fg.n2 + j];
            tot += w;
            if (std::abs(folded_y(cell, fg, j)) > half_width + 1e-12) continue;
            if (half_length && std::abs(folded_dx(cell, fg, i, j, x_center)) > *half_length + 1e-12) continue;
            in += w;
        }
    return tot > 0.0 ? in / tot : 0.0;
}

/// Average values over clusters of (relatively) degenerate frequencies.
inline std::vector<double> cluster_average(const std::vector<double>& freqs, const std::vector<double>& values,
                                           double rel_tol = 1e-6) {
    std::vector<double> out(values.size());
    std::size_t i = 0;
    while (i < freqs.size()) {
        std::size_t j = i + 1;
        while (j < freqs.size() && std::abs(freqs[j] - freqs[i]) <= rel_tol * std::max(std::abs(freqs[i]), 1e-12)) ++j;
        double s = 0.0;
        for (std::size_t t = i; t < j; ++t) s += values[t];
        for (std::size_t t = i; t < j; ++t) out[t] = s / static_cast<double>(j - i);
        i = j;
    }
    return out;
}

/// Bulk gap of the primitive cell used to decide whether a defect mode is guided.
inline std::optional<Gap> bulk_gap(const DomainSolver& unit_solver, const LatticeSpec& lattice, int samples_per_segment,
                                   int n_bands) {
    if (unit_solver.path_images().empty()) throw std::invalid_argument("bulk_gap needs a primitive-cell solver");
    const auto path = extended_path(lattice, irbz_path(lattice, samples_per_segment), unit_solver.path_images());
    BandStructure bs;
    bs.kpath = path;
    bs.unit_factor = unit_solver.unit_factor();
    bs.unit = unit_solver.unit();
    bs.frequencies.resize(path.size());
    parallel_for(path.size(), [&](std::size_t i) { bs.frequencies[i] = unit_solver.frequencies(path.samples[i].k, n_bands); });
    const auto rep = unit_solver.elastic() ? find_complete_gap(bs) : find_gaps(bs);
    return rep.largest();
}

struct WaveguideBands {
    BandStructure bands;                         ///< k along the guide, kx in units of 2 pi / a
    std::vector<double> kx;
    std::vector<std::vector<double>> localization;
    std::vector<std::vector<bool>> guided;
    std::vector<std::vector<std::vector<double>>> profiles;  ///< energy density of in-gap modes, empty otherwise
    std::optional<Gap> bulk_gap;
    double threshold = 0.6;

    [[nodiscard]] std::size_t guided_count() const {
        std::size_t c = 0;
        for (const auto& row : guided)
            for (bool g : row) c += g ? 1 : 0;
        return c;
    }
    /// Guided bands touch the gap at some kx.
    [[nodiscard]] bool has_guided_band() const { return guided_count() > 0; }
};

struct WaveguideOptions {
    double threshold = 0.6;
    int field_stride = 4;
    int bulk_samples_per_segment = 8;
};

/**
 * @brief Projected bands of a guide supercell and strip localization of each band.
 *
 * A band is guided at a kx when it lies strictly inside the bulk gap (primitive
 * cell, same basis family and cutoff) and more than `threshold` of its energy
 * sits in the guide strip.
 */
inline WaveguideBands waveguide_bands(const UnitCellGeometry& supercell, const UnitCellGeometry& unit,
                                      const DomainMaterial& material, int n_bands, int cutoff,
                                      const std::vector<double>& kx_samples, const WaveguideOptions& opt = {}) {
    if (!supercell.layout || supercell.layout->periods != 1) throw std::invalid_argument("waveguide_bands needs a guide supercell");
    if (n_bands < 1) throw std::invalid_argument("n_bands must be at least 1");
    if (kx_samples.empty()) throw std::invalid_argument("kx_samples must not be empty");
    for (double kx : kx_samples)
        if (kx < 0.0 || kx > 0.5 + 1e-12) throw std::invalid_argument("kx must lie in [0, 1/2] (units of 2 pi / a)");
    DomainSolver solver(supercell, material, default_basis(supercell, cutoff));
    DomainSolver unit_solver(unit, material, default_basis(unit, cutoff));
    WaveguideBands out;
    out.threshold = opt.threshold;
    out.kx = kx_samples;
    out.bulk_gap = bulk_gap(unit_solver, unit.lattice, opt.bulk_samples_per_segment, is_elastic(material) ? 10 : 6);
    std::vector<Vec2> ks;
    for (double kx : kx_samples) ks.push_back({2.0 * kPi * kx, 0.0});
    out.bands.kpath = kpath_from_points(ks);
    out.bands.polarization = solver.elastic() ? Polarization::elastic : Polarization::TE;
    out.bands.unit = solver.unit();
    out.bands.unit_factor = solver.unit_factor();
    out.bands.n_eff = solver.n_eff();
    out.bands.basis_size = solver.basis().size();
    if (!solver.elastic())
        for (const auto& k : ks) out.bands.light_line.push_back(norm(k) / (2.0 * kPi));
    const auto fg = field_grid(supercell, opt.field_stride);
    const std::size_t nk = ks.size();
    out.bands.frequencies.resize(nk);
    out.localization.resize(nk);
    out.guided.resize(nk);
    out.profiles.resize(nk);
    parallel_for(nk, [&](std::size_t ik) {
        const auto res = solver.modes(ks[ik], n_bands);
        auto f = PhotonicSolver::to_frequencies(res.values);
        std::vector<double> loc(f.size());
        std::vector<std::vector<double>> prof(f.size());
        for (std::size_t b = 0; b < f.size(); ++b) {
            const CVector v = res.vectors.col(static_cast<Eigen::Index>(b));
            prof[b] = energy_density(supercell, solver, ks[ik], v, fg);
            loc[b] = region_fraction(supercell, fg, prof[b], supercell.layout->strip_half_width);
        }
        loc = cluster_average(f, loc);
        std::vector<bool> g(f.size(), false);
        for (std::size_t b = 0; b < f.size(); ++b) {
            const bool in_gap = out.bulk_gap && f[b] > out.bulk_gap->lower && f[b] < out.bulk_gap->upper;
            g[b] = in_gap && loc[b] > opt.threshold;
            if (!in_gap) prof[b].clear();
        }
        out.profiles[ik] = std::move(prof);
        out.bands.frequencies[ik] = std::move(f);
        out.localization[ik] = std::move(loc);
        out.guided[ik] = std::move(g);
    });
    return out;
}

/// Sum of sqrt(e_a e_b) over a shared grid; 1 for identical normalized densities.
inline double profile_overlap(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("profiles live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

struct BandTrack {
    std::vector<double> frequency;     ///< one entry per run reached
    std::vector<double> localization;
    std::vector<bool> guided;
    bool complete = false;             ///< followed through every run

    [[nodiscard]] bool strictly_increasing() const {
        if (!complete || frequency.size() < 2) return false;
        for (std::size_t i = 1; i < frequency.size(); ++i)
            if (!(frequency[i] > frequency[i - 1])) return false;
        return true;
    }
};

/**
 * @brief Follows every guided band of the first run through a sweep at kx index ik.
 *
 * In each later run the continuation is the in-gap band whose energy profile
 * overlaps most with the previous one; it need not stay above the guided
 * threshold. Tracks are ordered by starting frequency.
 */
inline std::vector<BandTrack> track_guided_bands(const std::vector<WaveguideBands>& sweep, std::size_t ik) {
    std::vector<BandTrack> out;
    if (sweep.empty()) return out;
    for (const auto& run : sweep)
        if (ik >= run.kx.size()) throw std::out_of_range("kx index outside the sweep");
    const auto& first = sweep.front();
    for (std::size_t b0 = 0; b0 < first.bands.frequencies[ik].size(); ++b0) {
        if (!first.guided[ik][b0]) continue;
        BandTrack t;
        t.frequency.push_back(first.bands.frequencies[ik][b0]);
        t.localization.push_back(first.localization[ik][b0]);
        t.guided.push_back(true);
        const std::vector<double>* prev = &first.profiles[ik][b0];
        t.complete = true;
        for (std::size_t r = 1; r < sweep.size(); ++r) {
            const auto& run = sweep[r];
            std::optional<std::size_t> pick;
            double best = -1.0;
            for (std::size_t b = 0; b < run.bands.frequencies[ik].size(); ++b) {
                if (run.profiles[ik][b].empty()) continue;
                const double score = profile_overlap(*prev, run.profiles[ik][b]);
                if (score > best) {
                    best = score;
                    pick = b;
                }
            }
            if (!pick) {
                t.complete = false;
                break;
            }
            t.frequency.push_back(run.bands.frequencies[ik][*pick]);
            t.localization.push_back(run.localization[ik][*pick]);
            t.guided.push_back(run.guided[ik][*pick]);
            prev = &run.profiles[ik][*pick];
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct LocalizedMode {
    double frequency = 0.0;        ///< normalized
    double frequency_phys = 0.0;
    std::string unit;
    std::vector<double> profile;   ///< energy density, sums to 1
    int n1 = 0;
    int n2 = 0;
    Vec2 A1;
    Vec2 A2;
    double x_center = 0.0;
    double localization = 0.0;
    double decay_length = std::numeric_limits<double>::infinity();
    bool in_gap = true;
    bool degenerate = false;     ///< built from more than one supercell state
    int combined_states = 1;

    [[nodiscard]] double at(int i, int j) const { return profile[static_cast<std::size_t>(i) * n2 + j]; }
};

/**
 * @brief Energy decay length along the guide from a log-linear fit of the
 *        per-period energy envelope outside the core.
 */
inline double decay_length(const UnitCellGeometry& cell, const FieldGrid& fg, const std::vector<double>& e,
                           double x_center, double core_half) {
    const int periods = static_cast<int>(std::lround(cell.A1.x));
    std::vector<double> bins(static_cast<std::size_t>(periods), 0.0);
    for (int i = 0; i < fg.n1; ++i)
        for (int j = 0; j < fg.n2; ++j) {
            const double dx = folded_dx(cell, fg, i, j, x_center) + 0.5 * cell.A1.x;
            const int b = std::clamp(static_cast<int>(std::floor(dx)), 0, periods - 1);
            bins[static_cast<std::size_t>(b)] += e[static_cast<std::size_t>(i) * fg.n2 + j];
        }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int b = 0; b < periods; ++b) {
        const double d = std::abs(b + 0.5 - 0.5 * cell.A1.x);
        if (d <= core_half || bins[b] <= 0.0) continue;
        const double y = std::log(bins[b]);
        sx += d;
        sy += y;
        sxx += d * d;
        sxy += d * y;
        ++cnt;
    }
    if (cnt < 2) return std::numeric_limits<double>::infinity();
    const double den = cnt * sxx - sx * sx;
    if (std::abs(den) < 1e-300) return std::numeric_limits<double>::infinity();
    const double slope = (cnt * sxy - sx * sy) / den;
    return slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
}

struct CavityOptions {
    int per_a = 32;          ///< grid nodes per period
    int field_stride = 2;
    int bulk_samples_per_segment = 8;
    int mirror_kx_samples = 21;
    double cluster_width = 0.004;  ///< relative half-width of the quasi-mode frequency cluster
};

struct CavityResult {
    std::vector<LocalizedMode> modes;  ///< sorted by decreasing localization
    std::optional<Gap> bulk;           ///< bulk gap of the primitive cell
    std::optional<Gap> window;         ///< mirror-section mode gap used as the search window
    std::size_t basis_size = 0;
    UnitCellGeometry geometry;
};

/// Widest sub-interval of `gap` that contains none of `occupied`.
inline std::optional<std::pair<double, double>> widest_free_interval(std::pair<double, double> gap, std::vector<double> occupied) {
    std::vector<double> cuts{gap.first};
    std::sort(occupied.begin(), occupied.end());
    for (double f : occupied)
        if (f > gap.first && f < gap.second) cuts.push_back(f);
    cuts.push_back(gap.second);
    std::optional<std::pair<double, double>> best;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (!best || cuts[i + 1] - cuts[i] > best->second - best->first) best = std::make_pair(cuts[i], cuts[i + 1]);
    if (best && !(best->second > best->first)) return std::nullopt;
    return best;
}

/**
 * @brief In-gap modes of a heterostructure cavity.
 *
 * The supercell is the cavity (core between two mirrors), repeated
 * periodically, so neighbouring cores are 2 mirror_periods apart (plus any
 * access guide). Plane waves fill a disk
 * |G| <= gmax_2pi * 2 pi / a. The search window is the part of the bulk gap
 * free of guided bands of an infinite mirror-width guide.
 *
 * States of the closed supercell that lie within cluster_width (relative) of
 * each other can be hybrids of the cavity mode with its periodic images;
 * each reported mode is the combination within such a cluster that maximizes
 * the energy in the core region |x - x_c| <= core_periods/2 + 2 (full
 * transverse width). Its frequency is the energy-weighted mean.
 */
inline CavityResult cavity_modes(const UnitCellGeometry& unit, const HeterostructureSpec& hs,
                                 const DomainMaterial& material, int n_modes, double gmax_2pi,
                                 const CavityOptions& opt = {}) {
    if (n_modes < 1) throw std::invalid_argument("n_modes must be at least 1");
    if (!(gmax_2pi > 0.0)) throw std::invalid_argument("cavity plane-wave radius must be positive");
    if (!(opt.cluster_width >= 0.0)) throw std::invalid_argument("cluster_width must be non-negative");
    CavityResult out;
    out.geometry = build_cavity_supercell(unit, hs, opt.per_a);
    const auto& sc = out.geometry;
    const double gmax = gmax_2pi * 2.0 * kPi;
    auto basis = PlaneWaveBasis::disk(sc.A1, sc.A2, gmax);
    if (4 * basis.max_m1() >= sc.n1 || 4 * basis.max_m2() >= sc.n2)
        throw std::invalid_argument("cavity grid too coarse for the plane-wave radius");
    out.basis_size = basis.size();
    const UnitCellGeometry ucell = build_unit_cell(unit.lattice, unit.hole, opt.per_a);
    {
        const UnitCellGeometry fine = build_unit_cell(unit.lattice, unit.hole, std::max(64, 4 * opt.per_a));
        DomainSolver us(fine, material, PlaneWaveBasis::disk(fine.A1, fine.A2, gmax));
        out.bulk = bulk_gap(us, unit.lattice, opt.bulk_samples_per_segment, is_elastic(material) ? 10 : 6);
    }
    if (!out.bulk) return out;
    {
        DefectSpec mirror;
        mirror.W = hs.mirror_W;
        const auto guide = build_supercell(ucell, mirror, hs.n_transverse);
        // k = s B1 of the guide; s = j / Lc are the points the closed supercell
        // folds onto k = 0, and a disk shifted by k makes the two bases coincide
        const int nk = std::max(2, opt.mirror_kx_samples);
        std::vector<double> ss;
        for (int i = 0; i < nk; ++i) ss.push_back(0.5 * static_cast<double>(i) / (nk - 1));
        const int Lc = sc.layout->periods;
        for (int m = 0; 2 * m <= Lc; ++m) ss.push_back(static_cast<double>(m) / Lc);
        const Vec2 B1 = reciprocal_vectors(guide.A1, guide.A2)[0];
        std::vector<std::vector<double>> per_k(ss.size());
        parallel_for(per_k.size(), [&](std::size_t i) {
            const Vec2 k = ss[i] * B1;
            DomainSolver gs(guide, material, PlaneWaveBasis::disk(guide.A1, guide.A2, gmax, k));
            per_k[i] = PhotonicSolver::to_frequencies(gs.modes_in_window(k, out.bulk->lower, out.bulk->upper).values);
        });
        std::vector<double> occupied;
        for (const auto& v : per_k) occupied.insert(occupied.end(), v.begin(), v.end());
        const auto free = widest_free_interval({out.bulk->lower, out.bulk->upper}, occupied);
        if (!free) return out;
        // a state sitting on a guide band edge belongs to the mirror, not the cavity
        const double lo = free->first * (1.0 + 1e-6), hi = free->second * (1.0 - 1e-6);
        if (!(hi > lo)) return out;
        out.window = make_gap(lo, hi, -1, -1, out.bulk->lower_phys / out.bulk->lower);
    }
    DomainSolver solver(sc, material, std::move(basis));
    const Vec2 k0{0.0, 0.0};
    const auto res = solver.modes_in_window(k0, out.window->lower, out.window->upper);
    const auto f = PhotonicSolver::to_frequencies(res.values);
    const std::size_t M = f.size();
    if (M == 0) return out;
    const auto fg = field_grid(sc, opt.field_stride);
    const auto& L = *sc.layout;
    const std::size_t npts = static_cast<std::size_t>(fg.n1) * fg.n2;
    std::vector<char> core(npts);
    for (int i = 0; i < fg.n1; ++i)
        for (int j = 0; j < fg.n2; ++j)
            core[static_cast<std::size_t>(i) * fg.n2 + j] = std::abs(folded_dx(sc, fg, i, j, L.x_center)) <= L.core_half_length + 1e-12;
    std::vector<std::array<std::vector<cplx>, 2>> fields(M);
    parallel_for(M, [&](std::size_t b) { fields[b] = mode_fields(sc, solver, k0, res.vectors.col(static_cast<Eigen::Index>(b)), fg); });
    Eigen::MatrixXcd Wc(M, M), G(M, M);
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = a; b < M; ++b) {
            cplx in{0.0, 0.0}, all{0.0, 0.0};
            for (std::size_t t = 0; t < npts; ++t) {
                const cplx v = std::conj(fields[a][0][t]) * fields[b][0][t] + std::conj(fields[a][1][t]) * fields[b][1][t];
                all += v;
                if (core[t]) in += v;
            }
            Wc(a, b) = in;
            G(a, b) = all;
            Wc(b, a) = std::conj(in);
            G(b, a) = std::conj(all);
        }

    struct Candidate {
        double localization;
        double frequency;
        std::vector<std::size_t> members;
        Eigen::VectorXcd coeffs;
        std::size_t seed;
    };
    std::vector<Candidate> cands;
    for (std::size_t c = 0; c < M; ++c) {
        std::vector<std::size_t> cl;
        for (std::size_t b = 0; b < M; ++b)
            if (std::abs(f[b] - f[c]) <= opt.cluster_width * f[c]) cl.push_back(b);
        const auto n = static_cast<Eigen::Index>(cl.size());
        Eigen::MatrixXcd w(n, n), g(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                w(a, b) = Wc(static_cast<Eigen::Index>(cl[a]), static_cast<Eigen::Index>(cl[b]));
                g(a, b) = G(static_cast<Eigen::Index>(cl[a]), static_cast<Eigen::Index>(cl[b]));
            }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(w, g);
        if (es.info() != Eigen::Success) throw NumericalError("quasi-mode projection failed");
        Eigen::VectorXcd x = es.eigenvectors().col(n - 1);
        double num = 0.0, den = 0.0;
        for (Eigen::Index a = 0; a < n; ++a) {
            const double wt = std::norm(x(a)) * g(a, a).real();
            num += wt * f[cl[a]];
            den += wt;
        }
        cands.push_back({std::clamp(es.eigenvalues()(n - 1), 0.0, 1.0), num / den, cl, x, c});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.localization > b.localization; });
    std::vector<char> used(M, 0);
    for (const auto& cd : cands) {
        if (used[cd.seed]) continue;
        for (std::size_t m : cd.members) used[m] = 1;
        LocalizedMode m;
        m.frequency = cd.frequency;
        m.frequency_phys = cd.frequency * solver.unit_factor();
        m.unit = solver.unit();
        m.profile.assign(npts, 0.0);
        for (std::size_t t = 0; t < npts; ++t) {
            cplx ex{0.0, 0.0}, ey{0.0, 0.0};
            for (std::size_t a = 0; a < cd.members.size(); ++a) {
                ex += cd.coeffs(static_cast<Eigen::Index>(a)) * fields[cd.members[a]][0][t];
                ey += cd.coeffs(static_cast<Eigen::Index>(a)) * fields[cd.members[a]][1][t];
            }
            m.profile[t] = std::norm(ex) + std::norm(ey);
        }
        double tot = 0.0;
        for (double v : m.profile) tot += v;
        if (tot > 0.0)
            for (double& v : m.profile) v /= tot;
        m.n1 = fg.n1;
        m.n2 = fg.n2;
        m.A1 = sc.A1;
        m.A2 = sc.A2;
        m.x_center = L.x_center;
        m.localization = cd.localization;
        m.combined_states = static_cast<int>(cd.members.size());
        m.degenerate = cd.members.size() > 1;
        m.decay_length = decay_length(sc, fg, m.profile, L.x_center, L.core_half_length);
        m.in_gap = m.frequency > out.window->lower && m.frequency < out.window->upper;
        out.modes.push_back(std::move(m));
        if (out.modes.size() == static_cast<std::size_t>(n_modes)) break;
    }
    return out;
}

/// CSV (i, j, x, y, energy) with full precision.
inline void write_mode_csv(const LocalizedMode& m, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "i,j,x,y,energy\n" << std::setprecision(17);
    for (int i = 0; i < m.n1; ++i)
        for (int j = 0; j < m.n2; ++j) {
            const Vec2 r = (static_cast<double>(i) / m.n1) * m.A1 + (static_cast<double>(j) / m.n2) * m.A2;
            out << i << ',' << j << ',' << r.x << ',' << r.y << ',' << m.at(i, j) << '\n';
        }
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

/// Reads the energy column of a mode CSV back into an (n1 x n2) grid.
inline std::vector<double> read_mode_csv(const std::filesystem::path& file, int& n1, int& n2) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::array<double, 3>> rows;
    n1 = 0;
    n2 = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, x, y, e;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, x, ',');
        std::getline(ss, y, ',');
        std::getline(ss, e, ',');
        const int i = std::stoi(a), j = std::stoi(b);
        n1 = std::max(n1, i + 1);
        n2 = std::max(n2, j + 1);
        rows.push_back({static_cast<double>(i), static_cast<double>(j), std::stod(e)});
    }
    std::vector<double> g(static_cast<std::size_t>(n1) * n2, 0.0);
    for (const auto& r : rows) g[static_cast<std::size_t>(r[0]) * n2 + static_cast<std::size_t>(r[1])] = r[2];
    return g;
}

/// Writes the energy profile of a mode as CSV and as an SVG heatmap next to it.
inline std::vector<std::filesystem::path> export_mode_profile(const LocalizedMode& mode, const std::filesystem::path& stem) {
    std::filesystem::path csv = stem, svg = stem;
    csv += ".csv";
    svg += ".svg";
    write_mode_csv(mode, csv);
    write_svg(heatmap_svg(mode.profile, mode.n1, mode.n2, mode.A1, mode.A2), svg);
    return {csv, svg};
}

}  // namespace shamrock
