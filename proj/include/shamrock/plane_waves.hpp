/**
 * @file plane_waves.hpp
 * @brief Reciprocal-lattice plane-wave bases and coefficient matrices.
 */
#pragma once

#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace shamrock {

/// Set of reciprocal vectors G = m B1 + n B2 of a cell.
struct PlaneWaveBasis {
    Vec2 B1;
    Vec2 B2;
    std::vector<std::array<int, 2>> idx;
    std::vector<Vec2> g;

    [[nodiscard]] std::size_t size() const { return idx.size(); }
    [[nodiscard]] int max_m1() const {
        int r = 0;
        for (const auto& t : idx) r = std::max(r, std::abs(t[0]));
        return r;
    }
    [[nodiscard]] int max_m2() const {
        int r = 0;
        for (const auto& t : idx) r = std::max(r, std::abs(t[1]));
        return r;
    }

    void push(int m, int n) {
        idx.push_back({m, n});
        g.push_back(static_cast<double>(m) * B1 + static_cast<double>(n) * B2);
    }

    /// |m| <= n1, |n| <= n2.
    static PlaneWaveBasis parallelogram(Vec2 B1, Vec2 B2, int n1, int n2) {
        PlaneWaveBasis b{B1, B2, {}, {}};
        for (int m = -n1; m <= n1; ++m)
            for (int n = -n2; n <= n2; ++n) b.push(m, n);
        return b;
    }

    /// Third shell index: m - n when B1, B2 are 120 degrees apart (B1 + B2 is short), m + n at 60.
    static int third_index(Vec2 B1, Vec2 B2, int m, int n) { return dot(B1, B2) < 0.0 ? m - n : m + n; }

    /**
     * Hexagonal shell max(|m|, |n|, |third|) <= N; 3N^2 + 3N + 1 waves, closed
     * under the six-fold rotations.
     */
    static PlaneWaveBasis hexagon(Vec2 B1, Vec2 B2, int N) {
        if (N < 1) throw std::invalid_argument("cutoff must be at least 1");
        PlaneWaveBasis b{B1, B2, {}, {}};
        for (int m = -N; m <= N; ++m)
            for (int n = -N; n <= N; ++n)
                if (std::abs(third_index(B1, B2, m, n)) <= N) b.push(m, n);
        return b;
    }

    /**
     * Unit-cell hexagon folded into a cell tiled `tiles` times along a2: unit
     * index (m, n) plus shift j maps to (m, tiles * n + j), |j| <= (tiles-1)/2.
     * With no defect the operator splits into `tiles` unit-cell blocks at
     * k + j B2.
     */
    static PlaneWaveBasis folded_hexagon(Vec2 B1, Vec2 B2, int N, int tiles) {
        if (N < 1) throw std::invalid_argument("cutoff must be at least 1");
        if (tiles < 1 || tiles % 2 == 0) throw std::invalid_argument("tiles must be odd");
        const int h = (tiles - 1) / 2;
        PlaneWaveBasis b{B1, B2, {}, {}};
        for (int m = -N; m <= N; ++m)
            for (int n = -N; n <= N; ++n)
                if (std::abs(third_index(B1, B2, m, n)) <= N)
                    for (int j = -h; j <= h; ++j) b.push(m, tiles * n + j);
        return b;
    }

    /// All G with |shift + G| <= gmax (radians per a).
    static PlaneWaveBasis disk(Vec2 A1, Vec2 A2, double gmax, Vec2 shift = {0.0, 0.0}) {
        if (!(gmax > 0.0)) throw std::invalid_argument("gmax must be positive");
        const auto B = reciprocal_vectors(A1, A2);
        PlaneWaveBasis b{B[0], B[1], {}, {}};
        // |m| = |G . A1| / 2pi <= gmax |A1| / 2pi
        const double reach = gmax + norm(shift);
        const int r1 = static_cast<int>(std::ceil(reach * norm(A1) / (2.0 * kPi))) + 1;
        const int r2 = static_cast<int>(std::ceil(reach * norm(A2) / (2.0 * kPi))) + 1;
        for (int m = -r1; m <= r1; ++m)
            for (int n = -r2; n <= r2; ++n) {
                const Vec2 G = static_cast<double>(m) * b.B1 + static_cast<double>(n) * b.B2;
                if (norm(shift + G) <= gmax * (1.0 + 1e-12)) b.push(m, n);
            }
        return b;
    }
};

/// Default basis for a cell: hexagon for primitive cells, folded hexagon for guide supercells.
inline PlaneWaveBasis default_basis(const UnitCellGeometry& cell, int cutoff) {
    const auto B = reciprocal_vectors(cell.A1, cell.A2);
    if (!cell.layout) return PlaneWaveBasis::hexagon(B[0], B[1], cutoff);
    if (cell.layout->periods != 1)
        throw std::invalid_argument("multi-period supercells need an explicit (disk) basis");
    return PlaneWaveBasis::folded_hexagon(B[0], B[1], cutoff, cell.layout->n_transverse);
}

/// Fourier field wide enough for all basis differences.
inline FourierField basis_fourier(const UnitCellGeometry& cell, const PlaneWaveBasis& basis,
                                  std::pair<double, double> values) {
    return fourier_coefficients(cell, values, std::max(1, 2 * basis.max_m1()), std::max(1, 2 * basis.max_m2()));
}

/// M_st = c(G_s - G_t).
inline CMatrix coefficient_matrix(const PlaneWaveBasis& basis, const FourierField& f) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    CMatrix M(n, n);
    for (Eigen::Index t = 0; t < n; ++t)
        for (Eigen::Index s = 0; s < n; ++s)
            M(s, t) = f.at(basis.idx[s][0] - basis.idx[t][0], basis.idx[s][1] - basis.idx[t][1]);
    return M;
}

/// Replace M by (M + M^H)/2.
inline void hermitize(CMatrix& M) {
    CMatrix h = 0.5 * (M + M.adjoint());
    M = std::move(h);
}

}  // namespace shamrock
