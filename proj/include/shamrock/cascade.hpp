/**
 * @file cascade.hpp
 * @brief Lambda-system photon-phonon cascade: cavity-enhanced rates, regime
 *        checks, elastic and Raman scattering amplitudes, success curves and
 *        finite-bandwidth averaging.
 *
 * All rates and detunings are angular frequencies in one common unit.
 */
#pragma once

#include "numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shamrock {

struct EmitterRates {
    double g12 = 0.0;
    double g13 = 0.0;
    double g23 = 0.0;
    double kappa_eo = 1.0;
    double kappa_em = 1.0;
    double kappa_io = 0.0;
    double kappa_im = 0.0;
    double gamma3 = 0.0;
    double gamma2 = 0.0;

    void validate() const {
        for (double v : {g12, g13, g23, kappa_eo, kappa_em, kappa_io, kappa_im, gamma3, gamma2})
            if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("rates must be finite and non-negative");
        if (!(kappa_eo > 0.0) || !(kappa_em > 0.0)) throw std::invalid_argument("kappa_eo and kappa_em must be positive");
    }
};

struct EffectiveRates {
    double Gamma12 = 0.0;
    double Gamma13 = 0.0;
    double Gamma23 = 0.0;
    double gamma3 = 0.0;
    double beta_cav = 0.0;
    double C_opt = 0.0;
    double C_mech = 0.0;

    /// Gamma13 + Gamma23 + gamma3, the FWHM of |t_raman|^2.
    [[nodiscard]] double linewidth() const { return Gamma13 + Gamma23 + gamma3; }
    /// C_mech / (1 + C_mech); a model extrapolation, not part of the scattering amplitudes.
    [[nodiscard]] double phonon_branch_efficiency() const {
        return std::isinf(C_mech) ? 1.0 : C_mech / (1.0 + C_mech);
    }
};

inline double safe_ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

inline EffectiveRates effective_rates(const EmitterRates& r) {
    r.validate();
    EffectiveRates e;
    e.Gamma12 = 2.0 * r.g12 * r.g12 / r.kappa_em;
    e.Gamma13 = 2.0 * r.g13 * r.g13 / r.kappa_eo;
    e.Gamma23 = 2.0 * r.g23 * r.g23 / r.kappa_eo;
    e.gamma3 = r.gamma3;
    const double G = e.Gamma13 + e.Gamma23;
    e.beta_cav = G == 0.0 ? 0.0 : G / (G + r.gamma3);
    e.C_opt = safe_ratio(4.0 * (r.g13 * r.g13 + r.g23 * r.g23), r.kappa_eo * r.gamma3);
    e.C_mech = safe_ratio(2.0 * r.g12 * r.g12, r.kappa_em * r.gamma2);
    return e;
}

/// Rates with Gamma13 = Gamma23 = Gamma and gamma3 chosen to give beta_cav.
inline EffectiveRates matched_rates(double Gamma, double beta) {
    if (!(Gamma > 0.0) || !(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("need Gamma > 0 and beta in (0, 1]");
    EffectiveRates e;
    e.Gamma13 = Gamma;
    e.Gamma23 = Gamma;
    e.gamma3 = 2.0 * Gamma * (1.0 - beta) / beta;
    e.beta_cav = beta;
    e.C_opt = std::numeric_limits<double>::quiet_NaN();
    e.C_mech = std::numeric_limits<double>::quiet_NaN();
    return e;
}

struct RegimeCheck {
    std::string name;
    double ratio = 0.0;   ///< the quantity compared against the threshold
    bool passed = false;
    double margin = 0.0;  ///< ratio / threshold
};

struct RegimeReport {
    double factor = 10.0;
    std::vector<RegimeCheck> checks;

    [[nodiscard]] bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const RegimeCheck& c) { return c.passed; });
    }
    [[nodiscard]] const RegimeCheck& get(const std::string& n) const {
        for (const auto& c : checks)
            if (c.name == n) return c;
        throw std::out_of_range("no regime check named " + n);
    }
};

/**
 * @brief Over-coupling, bad-cavity and cooperativity conditions, each read as
 *        "ratio >= factor". Never throws on physical inputs.
 */
inline RegimeReport validate_regime(const EmitterRates& r, double factor = 10.0) {
    RegimeReport rep;
    rep.factor = factor;
    const auto e = effective_rates(r);
    auto add = [&](std::string name, double ratio) {
        rep.checks.push_back({std::move(name), ratio, ratio >= factor, ratio / factor});
    };
    add("overcoupled_optical", safe_ratio(r.kappa_eo, r.kappa_io));
    add("overcoupled_mechanical", safe_ratio(r.kappa_em, r.kappa_im));
    add("bad_cavity_optical", safe_ratio(r.kappa_eo, std::max(r.g13, r.g23)));
    add("bad_cavity_mechanical", safe_ratio(r.kappa_em, r.g12));
    add("cooperativity_optical", e.C_opt);
    add("cooperativity_mechanical", e.C_mech);
    return rep;
}

inline cplx cascade_denominator(double delta, const EffectiveRates& er, double gamma3) {
    const cplx den{delta, 0.5 * (er.Gamma13 + er.Gamma23 + gamma3)};
    if (den == cplx{0.0, 0.0}) throw std::domain_error("zero denominator: no emitter coupling and zero detuning");
    return den;
}

/// (Delta - i(G13 - G23 - g3)/2) / (Delta + i(G13 + G23 + g3)/2).
inline cplx t_elastic(double delta, const EffectiveRates& er, double gamma3) {
    const cplx num{delta, -0.5 * (er.Gamma13 - er.Gamma23 - gamma3)};
    return num / cascade_denominator(delta, er, gamma3);
}

/// -i sqrt(G13 G23) / (Delta + i(G13 + G23 + g3)/2).
inline cplx t_raman(double delta, const EffectiveRates& er, double gamma3) {
    const cplx num{0.0, -std::sqrt(er.Gamma13 * er.Gamma23)};
    return num / cascade_denominator(delta, er, gamma3);
}

struct ScatteringResult {
    double delta = 0.0;
    cplx t_elastic;
    cplx t_raman;
    double p_success = 0.0;
    double p_elastic = 0.0;
    double p_loss = 0.0;
};

inline ScatteringResult scatter(double delta, const EffectiveRates& er, double gamma3) {
    ScatteringResult s;
    s.delta = delta;
    s.t_elastic = t_elastic(delta, er, gamma3);
    s.t_raman = t_raman(delta, er, gamma3);
    s.p_success = std::norm(s.t_raman);
    s.p_elastic = std::norm(s.t_elastic);
    s.p_loss = 1.0 - s.p_success - s.p_elastic;
    return s;
}

/// n_samples evenly spaced detunings over [range.first, range.second].
inline std::vector<ScatteringResult> success_curve(const EffectiveRates& er, double gamma3,
                                                   std::pair<double, double> range, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("n_samples must be at least 2");
    if (!(range.second > range.first)) throw std::invalid_argument("detuning range must be increasing");
    std::vector<ScatteringResult> out(static_cast<std::size_t>(n_samples));
    const double step = (range.second - range.first) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) out[i] = scatter(range.first + step * i, er, gamma3);
    return out;
}

enum class SpectralShape { lorentzian, gaussian };

struct SpectralDensity {
    SpectralShape shape = SpectralShape::lorentzian;
    double center = 0.0;
    double width = 1.0;  ///< FWHM

    void validate() const {
        if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(center))
            throw std::invalid_argument("spectral width must be positive and finite");
    }

    /// Normalized density at offset u from the center.
    [[nodiscard]] double operator()(double u) const {
        if (shape == SpectralShape::lorentzian) {
            const double b = 0.5 * width;
            return b / (std::numbers::pi * (u * u + b * b));
        }
        const double s = width / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
        return std::exp(-0.5 * (u / s) * (u / s)) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
};

/**
 * @brief P = integral |t_raman(Delta)|^2 S(Delta - center) dDelta.
 *
 * Adaptive Gauss-Kronrod on pieces split at geometric distances from the
 * emitter resonance and from the packet center.
 */
inline double wavepacket_success(const SpectralDensity& spec, const EffectiveRates& er, double gamma3) {
    spec.validate();
    const double a = 0.5 * (er.Gamma13 + er.Gamma23 + gamma3);
    if (!(a > 0.0)) throw std::domain_error("zero emitter linewidth");
    const double peak = er.Gamma13 * er.Gamma23;
    if (peak == 0.0) return 0.0;
    // variable is the offset u from the packet center, so a narrow packet
    // sees exact arguments; the emitter factor is smooth on the scale a
    const double c = spec.center;
    auto f = [&](double u) {
        const double d = c + u;
        return peak / (d * d + a * a) * spec(u);
    };
    // geometric ladders around the packet (u = 0) and the emitter (u = -c),
    // from the smaller of the two widths out to 256 times the larger scale
    std::vector<double> cuts{0.0, -c};
    const double far = 256.0 * std::max({a, spec.width, std::abs(c)});
    for (double m = 0.25 * std::min(a, spec.width); m <= far; m *= 4.0) {
        cuts.push_back(m);
        cuts.push_back(-m);
        cuts.push_back(-c + m);
        cuts.push_back(-c - m);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    constexpr double kTol = 1e-11;
    constexpr unsigned kDepth = 15;
    // each piece is mapped onto [0, 1] (tails onto [0, inf)): the error
    // estimate misbehaves on intervals much shorter than 1
    double total = 0.0, err_total = 0.0;
    auto piece = [&](double x0, double scale, double u_end) {
        double err = 0.0;
        auto g = [&](double u) { return f(x0 + scale * u); };
        total += std::abs(scale) * GK::integrate(g, 0.0, u_end, kDepth, kTol, &err);
        err_total += std::abs(scale) * err;
    };
    const double inf = std::numeric_limits<double>::infinity();
    piece(cuts.front(), -std::max(std::abs(cuts.front()), a), inf);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) piece(cuts[i], cuts[i + 1] - cuts[i], 1.0);
    piece(cuts.back(), std::max(std::abs(cuts.back()), a), inf);
    if (!(err_total <= 1e-9 * std::max(std::abs(total), 1e-300)))
        throw NumericalError("wavepacket quadrature did not converge");
    return total;
}

/// Closed form for a Lorentzian packet: G13 G23 (a + b) / (a (c^2 + (a + b)^2)), a = linewidth/2, b = FWHM/2.
inline double lorentzian_overlap(const SpectralDensity& spec, const EffectiveRates& er, double gamma3) {
    const double a = 0.5 * (er.Gamma13 + er.Gamma23 + gamma3);
    const double b = 0.5 * spec.width;
    const double c = spec.center;
    return er.Gamma13 * er.Gamma23 * (a + b) / (a * (c * c + (a + b) * (a + b)));
}

/// CSV (delta_over_linewidth, p_success, p_elastic, p_loss).
inline void write_curve_csv(const std::vector<ScatteringResult>& curve, double linewidth, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "delta_over_linewidth,p_success,p_elastic,p_loss\n" << std::setprecision(15);
    for (const auto& s : curve) out << s.delta / linewidth << ',' << s.p_success << ',' << s.p_elastic << ',' << s.p_loss << '\n';
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace shamrock
