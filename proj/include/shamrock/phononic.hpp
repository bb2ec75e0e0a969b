/**
 * @file phononic.hpp
 * @brief 2D plane-strain elastic bands with cubic (rotatable) stiffness.
 *
 * Stiffness is scaled by c44 and density by rho, so eigenvalues are
 * ((omega a / 2 pi) / sqrt(c44/rho))^2. Holes are a soft filler.
 */
#pragma once

#include "bands.hpp"
#include "numerics.hpp"
#include "plane_waves.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace shamrock {

struct ElasticMaterial {
    double c11 = 118.8e9;
    double c12 = 53.8e9;
    double c44 = 59.4e9;
    double rho = 5317.0;
    double axis_rotation = 0.0;       ///< radians
    double filler_stiffness = 1e-6;   ///< hole stiffness relative to the solid
    double filler_density = 1e-6;     ///< hole density relative to the solid

    void validate() const {
        for (double v : {c11, c12, c44, rho, axis_rotation, filler_stiffness, filler_density})
            if (!std::isfinite(v)) throw std::invalid_argument("elastic parameters must be finite");
        if (!(c11 > 0.0) || !(c44 > 0.0)) throw std::invalid_argument("c11 and c44 must be positive");
        if (!(c11 > std::abs(c12))) throw std::invalid_argument("c11 must exceed |c12|");
        if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
        if (!(filler_stiffness > 0.0) || !(filler_density > 0.0))
            throw std::invalid_argument("filler parameters must be positive");
    }

    /// sqrt(c44/rho) in m/s.
    [[nodiscard]] double shear_speed() const { return std::sqrt(c44 / rho); }
};

using Stiffness2D = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

/// In-plane block of the cubic tensor divided by c44, rotated by axis_rotation.
inline Stiffness2D stiffness_tensor(const ElasticMaterial& m) {
    Stiffness2D c{};
    const double c11 = m.c11 / m.c44, c12 = m.c12 / m.c44;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    double v = 0.0;
                    if (i == j && k == l) v = (i == k) ? c11 : c12;
                    if (i != j && k != l) v = 1.0;
                    c[i][j][k][l] = v;
                }
    if (m.axis_rotation == 0.0) return c;
    const double cs = std::cos(m.axis_rotation), sn = std::sin(m.axis_rotation);
    const double R[2][2] = {{cs, -sn}, {sn, cs}};
    Stiffness2D r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b)
                            for (int p = 0; p < 2; ++p)
                                for (int q = 0; q < 2; ++q) s += R[i][a] * R[j][b] * R[k][p] * R[l][q] * c[a][b][p][q];
                    r[i][j][k][l] = s;
                }
    return r;
}

/**
 * Operations of `ops` that leave the stiffness tensor unchanged. Only these are
 * symmetries of the elastic spectrum; cubic stiffness keeps the mirror at 90
 * degrees of p3m1 but not C3.
 */
inline std::vector<PointOp> stiffness_symmetries(const std::vector<PointOp>& ops, const ElasticMaterial& m,
                                                 double tol = 1e-12) {
    const auto c = stiffness_tensor(m);
    std::vector<PointOp> kept;
    for (const auto& op : ops) {
        const Mat2& R = op.matrix;
        double dev = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) {
                        double s = 0.0;
                        for (int a = 0; a < 2; ++a)
                            for (int b = 0; b < 2; ++b)
                                for (int p = 0; p < 2; ++p)
                                    for (int q = 0; q < 2; ++q)
                                        s += R(i, a) * R(j, b) * R(k, p) * R(l, q) * c[a][b][p][q];
                        dev = std::max(dev, std::abs(s - c[i][j][k][l]));
                    }
        if (dev <= tol * (m.c11 / m.c44)) kept.push_back(op);
    }
    return kept;
}

/// Path images for the elastic spectrum: cell symmetries that also keep the stiffness.
inline std::vector<Mat2> elastic_path_images(const UnitCellGeometry& cell, const ElasticMaterial& m) {
    return path_images(stiffness_symmetries(cell_symmetries(cell, point_group(SpaceGroup::p6mm)), m));
}

inline double ghz_factor(const ElasticMaterial& m, double a_m) { return m.shear_speed() / a_m / 1e9; }

/**
 * Generalized problem A u = lambda B u with 2 displacement components per plane
 * wave (component-major layout: index = component * N + wave).
 */
class ElasticSolver {
public:
    ElasticSolver(const UnitCellGeometry& cell, const ElasticMaterial& material, PlaneWaveBasis basis)
        : basis_(std::move(basis)), c_(stiffness_tensor(material)) {
        material.validate();
        const auto wc = basis_fourier(cell, basis_, {1.0, material.filler_stiffness});
        stiff_ = coefficient_matrix(basis_, wc);
        hermitize(stiff_);
        if (material.filler_density == material.filler_stiffness) {
            dens_ = stiff_;
        } else {
            dens_ = coefficient_matrix(basis_, basis_fourier(cell, basis_, {1.0, material.filler_density}));
            hermitize(dens_);
        }
    }

    [[nodiscard]] const PlaneWaveBasis& basis() const { return basis_; }

    [[nodiscard]] HermitianProblem problem(Vec2 k, int n_wanted) const {
        const auto n = static_cast<Eigen::Index>(basis_.size());
        HermitianProblem p;
        p.n_wanted = n_wanted;
        p.matrix_a.resize(2 * n, 2 * n);
        CMatrix B = CMatrix::Zero(2 * n, 2 * n);
        std::vector<Vec2> q(static_cast<std::size_t>(n));
        for (Eigen::Index s = 0; s < n; ++s) q[s] = (1.0 / (2.0 * kPi)) * (k + basis_.g[s]);
        for (int i = 0; i < 2; ++i)
            for (int kk = 0; kk < 2; ++kk) {
                const double c00 = c_[i][0][kk][0], c01 = c_[i][0][kk][1], c10 = c_[i][1][kk][0], c11 = c_[i][1][kk][1];
                for (Eigen::Index t = 0; t < n; ++t) {
                    const double tx = q[t].x, ty = q[t].y;
                    for (Eigen::Index s = 0; s < n; ++s) {
                        const double sx = q[s].x, sy = q[s].y;
                        const double w = sx * (c00 * tx + c01 * ty) + sy * (c10 * tx + c11 * ty);
                        p.matrix_a(i * n + s, kk * n + t) = stiff_(s, t) * w;
                    }
                }
            }
        B.topLeftCorner(n, n) = dens_;
        B.bottomRightCorner(n, n) = dens_;
        p.matrix_b = std::move(B);
        return p;
    }

    [[nodiscard]] std::vector<double> frequencies(Vec2 k, int n) const {
        return to_frequencies(hermitian_eigensolve(problem(k, n)).values);
    }

    [[nodiscard]] EigenResult modes(Vec2 k, int n) const { return hermitian_eigensolve(problem(k, n)); }

    [[nodiscard]] EigenResult modes_in_window(Vec2 k, double lo, double hi) const {
        HermitianProblem p = problem(k, 1);
        p.value_window = std::make_pair(lo * lo, hi * hi);
        return hermitian_eigensolve(p);
    }

    static std::vector<double> to_frequencies(const std::vector<double>& eig) {
        std::vector<double> f(eig.size());
        for (std::size_t i = 0; i < eig.size(); ++i) f[i] = std::sqrt(std::max(0.0, eig[i]));
        return f;
    }

private:
    PlaneWaveBasis basis_;
    Stiffness2D c_;
    CMatrix stiff_;
    CMatrix dens_;
};

inline HermitianProblem assemble_elastic_operator(const UnitCellGeometry& cell, const ElasticMaterial& material, Vec2 k,
                                                  int cutoff, int n_wanted = 1) {
    ElasticSolver solver(cell, material, default_basis(cell, cutoff));
    return solver.problem(k, n_wanted);
}

inline BandStructure elastic_band_structure(const ElasticSolver& solver, const ElasticMaterial& material,
                                            const KPath& kpath, int n_bands, double a_m) {
    if (n_bands < 1) throw std::invalid_argument("n_bands must be at least 1");
    BandStructure bs;
    bs.kpath = kpath;
    bs.polarization = Polarization::elastic;
    bs.unit = "GHz";
    bs.unit_factor = ghz_factor(material, a_m);
    bs.basis_size = solver.basis().size();
    bs.frequencies.resize(kpath.size());
    parallel_for(kpath.size(), [&](std::size_t i) { bs.frequencies[i] = solver.frequencies(kpath.samples[i].k, n_bands); });
    return bs;
}

inline BandStructure elastic_band_structure(const UnitCellGeometry& cell, const ElasticMaterial& material,
                                            const KPath& kpath, int n_bands, int cutoff) {
    ElasticSolver solver(cell, material, default_basis(cell, cutoff));
    return elastic_band_structure(solver, material, kpath, n_bands, cell.lattice.a);
}

}  // namespace shamrock
