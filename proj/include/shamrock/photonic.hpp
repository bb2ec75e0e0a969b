/**
 * @file photonic.hpp
 * @brief 2D plane-wave photonic bands of the slab in the effective-index
 *        approximation.
 *
 * Frequencies are normalized as omega a / (2 pi c); eigenvalues are their squares.
 */
#pragma once

#include "bands.hpp"
#include "numerics.hpp"
#include "plane_waves.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shamrock {

struct PhotonicMaterial {
    double n_bulk = 3.48;
    double d_over_a = 0.65;
    /// Wavelength at which the slab effective index is evaluated.
    double target_wavelength_nm = 870.0;
    /// Fixed effective index; skips the slab dispersion solve when set.
    std::optional<double> n_eff_override;

    void validate() const {
        if (!(n_bulk > 1.0) || !std::isfinite(n_bulk)) throw std::invalid_argument("n_bulk must exceed 1");
        if (!(d_over_a > 0.0) || !std::isfinite(d_over_a)) throw std::invalid_argument("d_over_a must be positive");
        if (!(target_wavelength_nm > 0.0)) throw std::invalid_argument("target wavelength must be positive");
        if (n_eff_override && !(*n_eff_override >= 1.0)) throw std::invalid_argument("n_eff override must be >= 1");
    }
};

class NoGuidedMode : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Even fundamental-mode residual of a symmetric air-clad slab.
 *
 * F(n) = kappa sin(kappa d/2) - r gamma cos(kappa d/2), r = 1 (TE) or n_bulk^2 (TM),
 * with kappa = k0 sqrt(n_bulk^2 - n^2), gamma = k0 sqrt(n^2 - 1), k0 = 2 pi f / a.
 */
inline double slab_dispersion(const PhotonicMaterial& m, double target_freq, Polarization pol, double n) {
    const double k0 = 2.0 * kPi * target_freq;
    const double kappa = k0 * std::sqrt(std::max(0.0, m.n_bulk * m.n_bulk - n * n));
    const double gamma = k0 * std::sqrt(std::max(0.0, n * n - 1.0));
    const double r = pol == Polarization::TM ? m.n_bulk * m.n_bulk : 1.0;
    const double h = 0.5 * kappa * m.d_over_a;
    return kappa * std::sin(h) - r * gamma * std::cos(h);
}

/**
 * @brief Fundamental guided-mode effective index at a normalized frequency a/lambda.
 * @throws NoGuidedMode when the dispersion relation has no root in (1, n_bulk).
 */
inline double effective_index(const PhotonicMaterial& m, double target_freq, Polarization pol) {
    m.validate();
    if (!(target_freq > 0.0)) throw std::invalid_argument("target frequency must be positive");
    if (pol == Polarization::elastic) throw std::invalid_argument("effective index needs TE or TM polarization");
    const double k0 = 2.0 * kPi * target_freq;
    // fundamental mode: kappa d/2 < pi/2
    const double cut = kPi / (k0 * m.d_over_a);
    const double lo = std::max(1.0, std::sqrt(std::max(0.0, m.n_bulk * m.n_bulk - cut * cut)));
    const double hi = m.n_bulk;
    auto f = [&](double n) { return slab_dispersion(m, target_freq, pol, n); };
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw NoGuidedMode("no guided slab mode at the target frequency");
    return bracketed_root(f, lo, hi, 1e-14);
}

struct IndexChoice {
    double n_eff = 0.0;
    bool fallback = false;
    std::string warning;
};

/// Effective index used by the band solvers; falls back to n_bulk with a warning.
inline IndexChoice choose_index(const PhotonicMaterial& m, double a_m, Polarization pol) {
    m.validate();
    if (m.n_eff_override) return {*m.n_eff_override, false, ""};
    try {
        return {effective_index(m, a_m / (m.target_wavelength_nm * 1e-9), pol), false, ""};
    } catch (const NoGuidedMode& e) {
        return {m.n_bulk, true, std::string(e.what()) + "; using n_bulk"};
    }
}

inline double thz_factor(double a_m) { return kSpeedOfLight / a_m / 1e12; }

/**
 * Operator for one cell and basis. TE (H_z) uses the inverse of the
 * permittivity Toeplitz matrix in place of the transform of 1/eps. TM (E_z) is the generalized problem |k+G|^2 e = lambda [eps] e.
 */
class PhotonicSolver {
public:
    PhotonicSolver(const UnitCellGeometry& cell, double n_eff, PlaneWaveBasis basis, Polarization pol)
        : basis_(std::move(basis)), pol_(pol), n_eff_(n_eff) {
        if (pol == Polarization::elastic) throw std::invalid_argument("photonic solver needs TE or TM");
        if (!(n_eff >= 1.0)) throw std::invalid_argument("n_eff must be >= 1");
        const auto eps_f = basis_fourier(cell, basis_, {n_eff * n_eff, 1.0});
        eps_ = coefficient_matrix(basis_, eps_f);
        hermitize(eps_);
        if (pol_ == Polarization::TE) {
            Eigen::LLT<CMatrix> llt(eps_);
            if (llt.info() != Eigen::Success) throw NumericalError("permittivity matrix is not positive definite");
            const auto n = eps_.rows();
            eta_ = llt.solve(CMatrix::Identity(n, n));
            hermitize(eta_);
        }
    }

    [[nodiscard]] const PlaneWaveBasis& basis() const { return basis_; }
    [[nodiscard]] Polarization polarization() const { return pol_; }
    [[nodiscard]] double n_eff() const { return n_eff_; }

    [[nodiscard]] HermitianProblem problem(Vec2 k, int n_wanted) const {
        const auto n = static_cast<Eigen::Index>(basis_.size());
        HermitianProblem p;
        p.n_wanted = n_wanted;
        const double s = 1.0 / (4.0 * kPi * kPi);
        if (pol_ == Polarization::TE) {
            p.matrix_a.resize(n, n);
            for (Eigen::Index t = 0; t < n; ++t) {
                const Vec2 qt = k + basis_.g[t];
                for (Eigen::Index r = 0; r < n; ++r) p.matrix_a(r, t) = eta_(r, t) * (dot(k + basis_.g[r], qt) * s);
            }
        } else {
            p.matrix_a = CMatrix::Zero(n, n);
            for (Eigen::Index t = 0; t < n; ++t) {
                const Vec2 q = k + basis_.g[t];
                p.matrix_a(t, t) = dot(q, q) * s;
            }
            p.matrix_b = eps_;
        }
        return p;
    }

    /// Lowest n frequencies at k.
    [[nodiscard]] std::vector<double> frequencies(Vec2 k, int n) const {
        return to_frequencies(hermitian_eigensolve(problem(k, n)).values);
    }

    [[nodiscard]] EigenResult modes(Vec2 k, int n) const { return hermitian_eigensolve(problem(k, n)); }

    /// All modes with frequency in [lo, hi].
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
    Polarization pol_;
    double n_eff_;
    CMatrix eps_;
    CMatrix eta_;
};

/**
 * @brief Operator at one k with the default basis for the cell.
 * @return HermitianProblem with eigenvalues (omega a / 2 pi c)^2.
 */
inline HermitianProblem assemble_photonic_operator(const UnitCellGeometry& cell, const PhotonicMaterial& material,
                                                   Vec2 k, int cutoff, Polarization pol, int n_wanted = 1) {
    const auto idx = choose_index(material, cell.lattice.a, pol);
    PhotonicSolver solver(cell, idx.n_eff, default_basis(cell, cutoff), pol);
    return solver.problem(k, n_wanted);
}

/// Solve every k sample of a path concurrently.
inline BandStructure band_structure(const PhotonicSolver& solver, const KPath& kpath, int n_bands, double a_m) {
    if (n_bands < 1) throw std::invalid_argument("n_bands must be at least 1");
    BandStructure bs;
    bs.kpath = kpath;
    bs.polarization = solver.polarization();
    bs.unit = "THz";
    bs.unit_factor = thz_factor(a_m);
    bs.n_eff = solver.n_eff();
    bs.basis_size = solver.basis().size();
    bs.frequencies.resize(kpath.size());
    parallel_for(kpath.size(), [&](std::size_t i) { bs.frequencies[i] = solver.frequencies(kpath.samples[i].k, n_bands); });
    for (const auto& s : kpath.samples) bs.light_line.push_back(norm(s.k) / (2.0 * kPi));
    return bs;
}

inline BandStructure band_structure(const UnitCellGeometry& cell, const PhotonicMaterial& material, const KPath& kpath,
                                    int n_bands, int cutoff, Polarization pol) {
    const auto idx = choose_index(material, cell.lattice.a, pol);
    PhotonicSolver solver(cell, idx.n_eff, default_basis(cell, cutoff), pol);
    auto bs = band_structure(solver, kpath, n_bands, cell.lattice.a);
    bs.n_eff_fallback = idx.fallback;
    bs.warning = idx.warning;
    return bs;
}

}  // namespace shamrock
