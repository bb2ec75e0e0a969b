#include "shamrock/cascade.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <random>

using namespace shamrock;

namespace {

EffectiveRates rates(double g13, double g23, double g3 = 0.0) {
    EffectiveRates e;
    e.Gamma13 = g13;
    e.Gamma23 = g23;
    e.gamma3 = g3;
    return e;
}

// Lorentzian packet by residues: G13 G23 / (d^2 + a^2) against a Cauchy density
// of half-width b centered at c.
double lorentz_oracle(double G13, double G23, double g3, double fwhm, double c) {
    const double a = 0.5 * (G13 + G23 + g3), b = 0.5 * fwhm;
    return G13 * G23 * (a + b) / (a * ((a + b) * (a + b) + c * c));
}

// Plain composite Simpson after d = c + s tan(theta), independent of the library path.
double simpson_oracle(const SpectralDensity& S, const EffectiveRates& er, double g3) {
    const double a = 0.5 * (er.Gamma13 + er.Gamma23 + g3);
    const double s = std::max(a, S.width);
    auto f = [&](double th) {
        const double d = S.center + s * std::tan(th);
        const double jac = s / (std::cos(th) * std::cos(th));
        return er.Gamma13 * er.Gamma23 / (d * d + a * a) * S(d - S.center) * jac;
    };
    const int n = 400000;
    const double lo = -0.5 * std::numbers::pi + 1e-12, hi = 0.5 * std::numbers::pi - 1e-12, h = (hi - lo) / n;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
}

}  // namespace

TEST(EffectiveRates, Examples) {
    EmitterRates r;
    r.kappa_eo = 20.0;
    r.gamma3 = 0.05;
    auto e = effective_rates(r);
    EXPECT_EQ(e.Gamma13, 0.0);
    EXPECT_EQ(e.Gamma23, 0.0);
    EXPECT_EQ(e.beta_cav, 0.0);

    r.g13 = r.g23 = 1.0;
    e = effective_rates(r);
    EXPECT_NEAR(e.Gamma13, 0.1, 1e-15);
    EXPECT_NEAR(e.Gamma23, 0.1, 1e-15);
    EXPECT_NEAR(e.beta_cav, 0.8, 1e-15);
    EXPECT_NEAR(e.C_opt, 4.0 * 2.0 / (20.0 * 0.05), 1e-12);

    r.gamma3 = 0.0;
    e = effective_rates(r);
    EXPECT_EQ(e.beta_cav, 1.0);
    EXPECT_TRUE(std::isinf(e.C_opt));
    EXPECT_TRUE(std::isinf(e.C_mech) || e.C_mech == 0.0);

    r.g12 = 2.0;
    r.kappa_em = 8.0;
    r.gamma2 = 0.5;
    e = effective_rates(r);
    EXPECT_NEAR(e.Gamma12, 1.0, 1e-15);
    EXPECT_NEAR(e.C_mech, 2.0, 1e-15);
    EXPECT_NEAR(e.phonon_branch_efficiency(), 2.0 / 3.0, 1e-15);

    r.kappa_eo = 0.0;
    EXPECT_THROW(effective_rates(r), std::invalid_argument);
    r.kappa_eo = 1.0;
    r.g13 = -1.0;
    EXPECT_THROW(effective_rates(r), std::invalid_argument);
}

TEST(Regime, RatiosAndFlags) {
    EmitterRates r{1.0, 1.0, 1.0, 100.0, 100.0, 1.0, 1.0, 0.01, 0.01};
    const auto rep = validate_regime(r);
    EXPECT_TRUE(rep.get("overcoupled_optical").passed);
    EXPECT_TRUE(rep.get("overcoupled_mechanical").passed);
    EXPECT_TRUE(rep.get("bad_cavity_optical").passed);
    EXPECT_TRUE(rep.get("bad_cavity_mechanical").passed);
    EXPECT_DOUBLE_EQ(rep.get("overcoupled_optical").ratio, 100.0);
    EXPECT_DOUBLE_EQ(rep.get("bad_cavity_mechanical").margin, 10.0);
    // 4 (1 + 1) / (100 * 0.01) and 2 / (100 * 0.01)
    EXPECT_NEAR(rep.get("cooperativity_optical").ratio, 8.0, 1e-12);
    EXPECT_NEAR(rep.get("cooperativity_mechanical").ratio, 2.0, 1e-12);
    EXPECT_FALSE(rep.get("cooperativity_optical").passed);
    EXPECT_FALSE(rep.all_passed());
    EXPECT_TRUE(validate_regime(r, 1.5).all_passed());

    EmitterRates lossy = r;
    lossy.kappa_io = lossy.kappa_eo;
    EXPECT_FALSE(validate_regime(lossy).get("overcoupled_optical").passed);
    EmitterRates strong = r;
    strong.g13 = strong.kappa_eo;
    EXPECT_FALSE(validate_regime(strong).get("bad_cavity_optical").passed);
    EmitterRates lossless = r;
    lossless.kappa_io = 0.0;
    EXPECT_TRUE(std::isinf(validate_regime(lossless).get("overcoupled_optical").ratio));
    EXPECT_THROW(validate_regime(r).get("nope"), std::out_of_range);
}

TEST(Amplitudes, HandExamples) {
    const auto er = rates(1.0, 1.0);
    const cplx te = t_elastic(1.0, er, 0.0);
    EXPECT_NEAR(std::abs(te - cplx(0.5, -0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::norm(te), 0.5, 1e-15);
    const cplx tr = t_raman(0.0, er, 0.0);
    EXPECT_NEAR(std::abs(tr - cplx(-1.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(scatter(0.0, er, 0.0).p_success, 1.0, 1e-15);
    EXPECT_EQ(t_raman(0.3, rates(1.0, 0.0), 0.2), cplx(0.0, 0.0));
    EXPECT_NEAR(std::abs(t_elastic(1e9, rates(1.0, 0.5), 0.1)), 1.0, 1e-8);
    EXPECT_THROW(t_elastic(0.0, rates(0.0, 0.0), 0.0), std::domain_error);
}

TEST(Amplitudes, UnitarityWithoutLoss) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 5.0), d(-20.0, 20.0);
    for (int i = 0; i < 10000; ++i) {
        const auto er = rates(u(rng), u(rng));
        const auto s = scatter(d(rng), er, 0.0);
        ASSERT_NEAR(s.p_success + s.p_elastic, 1.0, 1e-12);
    }
    for (int i = 0; i < 100; ++i) {
        const double g3 = 1e-3 + u(rng);
        const auto s = scatter(0.0, rates(u(rng) + 1e-3, u(rng) + 1e-3), g3);
        EXPECT_LT(s.p_success + s.p_elastic, 1.0);
        EXPECT_GT(s.p_loss, 0.0);
    }
}

TEST(Amplitudes, ImpedanceMatching) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double g3 = u(rng), G23 = u(rng) + 1e-6;
        ASSERT_LT(std::abs(t_elastic(0.0, rates(G23 + g3, G23), g3)), 1e-12);
    }
}

TEST(Amplitudes, PeakIsBetaSquared) {
    for (double beta : {1.0, 0.98, 0.9, 0.8, 0.37}) {
        const auto er = matched_rates(0.7, beta);
        EXPECT_NEAR(scatter(0.0, er, er.gamma3).p_success, beta * beta, 1e-12) << beta;
        EXPECT_NEAR((er.Gamma13 + er.Gamma23) / er.linewidth(), beta, 1e-15);
    }
    EXPECT_THROW(matched_rates(0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(matched_rates(1.0, 1.5), std::invalid_argument);
}

TEST(Amplitudes, BoundsSymmetryAndScaling) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(1e-3, 4.0), d(-10.0, 10.0), sc(0.01, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const double G13 = u(rng), G23 = u(rng), g3 = u(rng) - 1e-3, delta = d(rng);
        const auto er = rates(G13, G23, g3);
        const auto s = scatter(delta, er, g3);
        EXPECT_LE(s.p_success, 4.0 * G13 * G23 / ((G13 + G23) * (G13 + G23)) + 1e-15);
        EXPECT_LE(s.p_success + s.p_elastic, 1.0 + 1e-12);
        EXPECT_GE(s.p_loss, -1e-12);
        EXPECT_DOUBLE_EQ(s.p_success, scatter(-delta, er, g3).p_success);
        const double k = sc(rng);
        const auto t = scatter(k * delta, rates(k * G13, k * G23, k * g3), k * g3);
        EXPECT_NEAR(std::abs(t.t_raman - s.t_raman), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(t.t_elastic - s.t_elastic), 0.0, 1e-12);
    }
}

TEST(Curve, ShapeAndTiming) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<ScatteringResult>> curves;
    for (double beta : {1.0, 0.9, 0.8}) {
        const auto er = matched_rates(1.0, beta);
        const double w = er.linewidth();
        curves.push_back(success_curve(er, er.gamma3, {-3.0 * w, 3.0 * w}, 601));
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
    const double peaks[] = {1.0, 0.81, 0.64};
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& cv = curves[c];
        ASSERT_EQ(cv.size(), 601u);
        EXPECT_NEAR(cv[300].delta, 0.0, 1e-12);
        EXPECT_NEAR(cv[300].p_success, peaks[c], 1e-12);
        for (std::size_t i = 0; i < cv.size(); ++i) EXPECT_NEAR(cv[i].p_success, cv[cv.size() - 1 - i].p_success, 1e-14);
        for (std::size_t i = 301; i < cv.size(); ++i) EXPECT_LT(cv[i].p_success, cv[i - 1].p_success);
    }
    // half maximum at |Delta| = linewidth / 2
    const auto er = matched_rates(1.0, 0.9);
    const double half = 0.5 * er.linewidth();
    EXPECT_NEAR(scatter(half, er, er.gamma3).p_success, 0.5 * 0.81, 1e-12);
    EXPECT_NEAR(scatter(-half, er, er.gamma3).p_success, 0.5 * 0.81, 1e-12);
    EXPECT_THROW(success_curve(er, er.gamma3, {0.0, 1.0}, 1), std::invalid_argument);
    EXPECT_THROW(success_curve(er, er.gamma3, {1.0, 0.0}, 5), std::invalid_argument);
}

TEST(Wavepacket, NarrowBandLimit) {
    for (double beta : {1.0, 0.9}) {
        const auto er = matched_rates(1.0, beta);
        const double w = er.linewidth();
        for (double c : {0.0, 0.3 * w})
            for (auto shape : {SpectralShape::lorentzian, SpectralShape::gaussian}) {
                const SpectralDensity S{shape, c, 1e-6 * w};
                const double p = wavepacket_success(S, er, er.gamma3);
                EXPECT_NEAR(p, scatter(c, er, er.gamma3).p_success, 1e-6) << beta << ' ' << c;
            }
    }
}

TEST(Wavepacket, LorentzianClosedForm) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.05, 3.0), c(-4.0, 4.0);
    for (int i = 0; i < 20; ++i) {
        const double G13 = u(rng), G23 = u(rng), g3 = u(rng), fwhm = u(rng), ctr = c(rng);
        const auto er = rates(G13, G23, g3);
        const SpectralDensity S{SpectralShape::lorentzian, ctr, fwhm};
        const double want = lorentz_oracle(G13, G23, g3, fwhm, ctr);
        EXPECT_NEAR(wavepacket_success(S, er, g3), want, 1e-8 * want);
        EXPECT_NEAR(lorentzian_overlap(S, er, g3), want, 1e-12 * want);
    }
    // width = linewidth, beta = 1: strictly below the single-frequency unity peak
    const auto er = matched_rates(1.0, 1.0);
    const double p = wavepacket_success({SpectralShape::lorentzian, 0.0, er.linewidth()}, er, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_NEAR(p, 0.5, 1e-10);
}

TEST(Wavepacket, GaussianAgainstSimpson) {
    const auto er = rates(0.8, 0.5, 0.2);
    for (double fwhm : {0.1, 1.0, 5.0})
        for (double ctr : {0.0, 0.7}) {
            const SpectralDensity S{SpectralShape::gaussian, ctr, fwhm};
            const double want = simpson_oracle(S, er, 0.2);
            EXPECT_NEAR(wavepacket_success(S, er, 0.2), want, 1e-8 * want) << fwhm << ' ' << ctr;
        }
}

TEST(Wavepacket, DecreasingInWidthAndNormalized) {
    const auto er = matched_rates(1.0, 0.9);
    for (auto shape : {SpectralShape::lorentzian, SpectralShape::gaussian}) {
        double prev = 1.0;
        for (double w : {1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0}) {
            const double p = wavepacket_success({shape, 0.0, w * er.linewidth()}, er, er.gamma3);
            EXPECT_LT(p, prev) << w;
            prev = p;
        }
        // density integrates to one
        const SpectralDensity S{shape, 0.4, 0.3};
        double sum = 0.0;
        const double h = 1e-4;
        for (double x = -200.0; x < 200.0; x += h) sum += S(x) * h;
        EXPECT_NEAR(sum, 1.0, shape == SpectralShape::lorentzian ? 2e-3 : 1e-9);
    }
    EXPECT_THROW(wavepacket_success({SpectralShape::gaussian, 0.0, 0.0}, er, er.gamma3), std::invalid_argument);
    EXPECT_EQ(wavepacket_success({SpectralShape::gaussian, 0.0, 1.0}, rates(1.0, 0.0, 0.1), 0.1), 0.0);
}

TEST(Export, CurveCsv) {
    const auto er = matched_rates(1.0, 0.8);
    const auto cv = success_curve(er, er.gamma3, {-1.0, 1.0}, 5);
    const auto file = std::filesystem::temp_directory_path() / "shamrock_curve_test.csv";
    write_curve_csv(cv, er.linewidth(), file);
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "delta_over_linewidth,p_success,p_elastic,p_loss");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
    std::filesystem::remove(file);
}
