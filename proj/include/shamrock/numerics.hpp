/**
 * @file numerics.hpp
 * @brief Dense Hermitian eigensolves, separable DFTs, root bracketing and a
 *        small k-point worker pool.
 */
#pragma once

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#ifndef lapack_complex_double
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

namespace shamrock {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using CVector = Eigen::VectorXcd;

/// Raised when a well-formed input fails inside a numerical kernel.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense Hermitian (generalized) eigenproblem A v = lambda B v.
struct HermitianProblem {
    CMatrix matrix_a;
    std::optional<CMatrix> matrix_b;
    int n_wanted = 1;
    /// When set, all eigenvalues in [first, second] are returned instead of the lowest n_wanted.
    std::optional<std::pair<double, double>> value_window;

    [[nodiscard]] Eigen::Index dim() const { return matrix_a.rows(); }
};

struct EigenResult {
    std::vector<double> values;
    CMatrix vectors;  ///< one column per eigenvalue
};

inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const CMatrix& m) {
    return max_abs(m - m.adjoint());
}

inline void validate(const HermitianProblem& p) {
    const auto n = p.matrix_a.rows();
    if (n == 0 || p.matrix_a.cols() != n) throw std::invalid_argument("matrix_a must be square and non-empty");
    const double scale = std::max(max_abs(p.matrix_a), 1e-300);
    if (hermiticity_residual(p.matrix_a) > 1e-10 * scale) throw std::invalid_argument("matrix_a is not Hermitian");
    if (p.matrix_b) {
        if (p.matrix_b->rows() != n || p.matrix_b->cols() != n) throw std::invalid_argument("matrix_b shape mismatch");
        const double sb = std::max(max_abs(*p.matrix_b), 1e-300);
        if (hermiticity_residual(*p.matrix_b) > 1e-10 * sb) throw std::invalid_argument("matrix_b is not Hermitian");
    }
    if (!p.value_window) {
        if (p.n_wanted < 1 || p.n_wanted > n) throw std::invalid_argument("n_wanted must lie in [1, N]");
    } else if (!(p.value_window->first < p.value_window->second)) {
        throw std::invalid_argument("value window must satisfy lo < hi");
    }
}

/**
 * @brief Lowest n_wanted (or windowed) eigenpairs of a Hermitian problem.
 *
 * Standard problems use zheevr, generalized ones zhegvx; the returned vectors
 * are B-orthonormal. Inputs are copied, so the problem stays untouched.
 */
inline EigenResult hermitian_eigensolve(const HermitianProblem& p) {
    validate(p);
    const lapack_int n = static_cast<lapack_int>(p.dim());
    CMatrix a = p.matrix_a;
    const bool windowed = p.value_window.has_value();
    const char range = windowed ? 'V' : 'I';
    const double vl = windowed ? p.value_window->first : 0.0;
    const double vu = windowed ? p.value_window->second : 0.0;
    const lapack_int il = 1;
    const lapack_int iu = windowed ? n : p.n_wanted;
    const lapack_int cols = windowed ? n : p.n_wanted;
    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    CMatrix z(n, cols);
    lapack_int info = 0;
    if (!p.matrix_b) {
        std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
        info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', range, 'U', n,
                              reinterpret_cast<lapack_complex_double*>(a.data()), n, vl, vu, il, iu, 0.0,
                              &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), n,
                              isuppz.data());
        if (info != 0) throw NumericalError("zheevr failed with info " + std::to_string(info));
    } else {
        CMatrix b = *p.matrix_b;
        std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
        info = LAPACKE_zhegvx(LAPACK_COL_MAJOR, 1, 'V', range, 'U', n,
                              reinterpret_cast<lapack_complex_double*>(a.data()), n,
                              reinterpret_cast<lapack_complex_double*>(b.data()), n, vl, vu, il, iu, 0.0,
                              &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()), n,
                              ifail.data());
        if (info > n) throw NumericalError("matrix_b is not positive definite");
        if (info != 0) throw NumericalError("zhegvx failed with info " + std::to_string(info));
    }
    EigenResult r;
    r.values.assign(w.begin(), w.begin() + found);
    r.vectors = z.leftCols(found);
    return r;
}

/**
 * @brief Root of f on a sign-changing bracket (TOMS 748).
 * @throws std::invalid_argument when f(lo) and f(hi) share a sign.
 */
inline double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo * fhi < 0.0)) throw std::invalid_argument("no sign change on bracket");
    std::uintmax_t max_iter = 400;
    auto stop = [tol](double x0, double x1) { return std::abs(x1 - x0) < tol; };
    auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, max_iter);
    const double m = 0.5 * (x0 + x1);
    return std::abs(f(x0)) < std::abs(f(m)) ? x0 : (std::abs(f(x1)) < std::abs(f(m)) ? x1 : m);
}

/// e^{sign 2 pi i t / n} for t = 0..n-1.
inline std::vector<cplx> twiddles(int n, int sign) {
    std::vector<cplx> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[i] = std::polar(1.0, sign * 2.0 * std::numbers::pi * i / n);
    return t;
}

inline int wrap_index(long long v, int n) {
    long long r = v % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

/**
 * @brief Direct separable DFT of a real n1 x n2 grid (row-major, i*n2 + j).
 *
 * Returns c(m,n) = (1/(n1 n2)) sum f(i,j) e^{-2 pi i (m i/n1 + n j/n2)} for
 * |m| <= k1, |n| <= k2, stored as (m+k1)*(2k2+1) + (n+k2).
 */
inline std::vector<cplx> dft2_real(const std::vector<double>& f, int n1, int n2, int k1, int k2) {
    if (static_cast<long long>(f.size()) != static_cast<long long>(n1) * n2)
        throw std::invalid_argument("grid size mismatch");
    const auto w1 = twiddles(n1, -1);
    const auto w2 = twiddles(n2, -1);
    const int s1 = 2 * k1 + 1;
    const int s2 = 2 * k2 + 1;
    // stage 1: transform along j for each row
    std::vector<cplx> tmp(static_cast<std::size_t>(n1) * s2);
    for (int i = 0; i < n1; ++i) {
        const double* row = f.data() + static_cast<std::size_t>(i) * n2;
        for (int q = 0; q < s2; ++q) {
            const int nn = q - k2;
            cplx acc = 0.0;
            for (int j = 0; j < n2; ++j) acc += row[j] * w2[wrap_index(static_cast<long long>(nn) * j, n2)];
            tmp[static_cast<std::size_t>(i) * s2 + q] = acc;
        }
    }
    std::vector<cplx> out(static_cast<std::size_t>(s1) * s2);
    const double norm = 1.0 / (static_cast<double>(n1) * n2);
    for (int p = 0; p < s1; ++p) {
        const int m = p - k1;
        for (int q = 0; q < s2; ++q) {
            cplx acc = 0.0;
            for (int i = 0; i < n1; ++i)
                acc += tmp[static_cast<std::size_t>(i) * s2 + q] * w1[wrap_index(static_cast<long long>(m) * i, n1)];
            out[static_cast<std::size_t>(p) * s2 + q] = acc * norm;
        }
    }
    return out;
}

/**
 * @brief Synthesize f(i,j) = sum_t c_t e^{2 pi i (m_t i/n1 + n_t j/n2)} on the grid.
 */
inline std::vector<cplx> synthesize(const std::vector<std::array<int, 2>>& idx, const cplx* coeffs, int n1, int n2) {
    const auto w1 = twiddles(n1, +1);
    const auto w2 = twiddles(n2, +1);
    int mmin = 0, mmax = 0;
    for (const auto& g : idx) {
        mmin = std::min(mmin, g[0]);
        mmax = std::max(mmax, g[0]);
    }
    const int sm = mmax - mmin + 1;
    // stage 1: for each m, h(m, j) = sum_{t with m_t = m} c_t e^{2 pi i n_t j / n2}
    std::vector<cplx> h(static_cast<std::size_t>(sm) * n2, cplx{0.0, 0.0});
    for (std::size_t t = 0; t < idx.size(); ++t) {
        const cplx c = coeffs[t];
        if (c == cplx{0.0, 0.0}) continue;
        cplx* hr = h.data() + static_cast<std::size_t>(idx[t][0] - mmin) * n2;
        const int nn = idx[t][1];
        for (int j = 0; j < n2; ++j) hr[j] += c * w2[wrap_index(static_cast<long long>(nn) * j, n2)];
    }
    std::vector<cplx> out(static_cast<std::size_t>(n1) * n2, cplx{0.0, 0.0});
    for (int p = 0; p < sm; ++p) {
        const int m = p + mmin;
        const cplx* hr = h.data() + static_cast<std::size_t>(p) * n2;
        bool any = false;
        for (int j = 0; j < n2 && !any; ++j) any = hr[j] != cplx{0.0, 0.0};
        if (!any) continue;
        for (int i = 0; i < n1; ++i) {
            const cplx ph = w1[wrap_index(static_cast<long long>(m) * i, n1)];
            cplx* orow = out.data() + static_cast<std::size_t>(i) * n2;
            for (int j = 0; j < n2; ++j) orow[j] += ph * hr[j];
        }
    }
    return out;
}

/// Number of worker threads used for independent solves.
inline unsigned worker_count(std::size_t jobs) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

/**
 * @brief Run fn(i) for i in [0, count) on a small pool; the first exception is rethrown.
 *
 * Each index writes only its own output slot, so results do not depend on scheduling.
 */
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned nw = worker_count(count);
    if (nw <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(nw);
        for (unsigned t = 0; t < nw; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(err_mutex);
                        if (!err) err = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace shamrock
