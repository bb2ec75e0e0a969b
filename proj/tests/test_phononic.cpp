#include "shamrock/phononic.hpp"
#include "shamrock/symmetry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace shamrock;

namespace {

const ShamrockHole kSolid{0.0, 0.0, 0.0, 0.0};

ElasticMaterial isotropic() {
    ElasticMaterial m;
    m.c12 = m.c11 - 2.0 * m.c44;
    return m;
}

// Christoffel speeds (units of sqrt(c44/rho)) for cubic constants rotated by phi, direction theta.
std::array<double, 2> christoffel(const ElasticMaterial& m, double theta) {
    // work in the crystal frame: direction relative to the cubic axes
    const double a = theta - m.axis_rotation;
    const double n1 = std::cos(a), n2 = std::sin(a);
    const double g11 = m.c11 * n1 * n1 + m.c44 * n2 * n2;
    const double g22 = m.c44 * n1 * n1 + m.c11 * n2 * n2;
    const double g12 = (m.c12 + m.c44) * n1 * n2;
    const double tr = g11 + g22, det = g11 * g22 - g12 * g12;
    const double disc = std::sqrt(0.25 * tr * tr - det);
    return {std::sqrt((0.5 * tr - disc) / m.c44), std::sqrt((0.5 * tr + disc) / m.c44)};
}

BandStructure rows(std::vector<std::vector<double>> r) {
    BandStructure bs;
    bs.frequencies = std::move(r);
    return bs;
}

}  // namespace

TEST(Homogeneous, IsotropicClosedForm) {
    const auto cell = build_unit_cell(LatticeSpec{}, kSolid, 64);
    const auto m = isotropic();
    const ElasticSolver s(cell, m, default_basis(cell, 5));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int i = 0; i < 6; ++i) {
        const Vec2 k{u(rng), u(rng)};
        const auto f = s.frequencies(k, 2);
        const double q = norm(k) / (2.0 * kPi);
        EXPECT_NEAR(f[0], q, 1e-8);
        EXPECT_NEAR(f[1], q * std::sqrt(m.c11 / m.c44), 1e-8);
    }
    // slopes of the two branches near Gamma
    const Vec2 k{0.05, 0.02};
    const auto f = s.frequencies(k, 2);
    const double q = norm(k) / (2.0 * kPi);
    EXPECT_NEAR(f[0] / q, 1.0, 1e-8);
    EXPECT_NEAR(f[1] / q, std::sqrt(m.c11 / m.c44), 1e-8);
}

TEST(Homogeneous, ChristoffelOracleGaAs) {
    const auto cell = build_unit_cell(LatticeSpec{}, kSolid, 64);
    for (double rot : {0.0, kPi / 4.0}) {
        ElasticMaterial m;
        m.axis_rotation = rot;
        const ElasticSolver s(cell, m, default_basis(cell, 5));
        for (double theta : {0.0, kPi / 6.0, kPi / 4.0, 1.1}) {
            const double q = 0.3;
            const Vec2 k{2.0 * kPi * q * std::cos(theta), 2.0 * kPi * q * std::sin(theta)};
            const auto f = s.frequencies(k, 2);
            const auto v = christoffel(m, theta);
            EXPECT_NEAR(f[0], q * v[0], 1e-8) << rot << ' ' << theta;
            EXPECT_NEAR(f[1], q * v[1], 1e-8) << rot << ' ' << theta;
        }
    }
    // longitudinal speed along the cubic axis is sqrt(c11/rho)
    const ElasticMaterial m;
    const ElasticSolver s(cell, m, default_basis(cell, 5));
    const double q = 0.2;
    const double vl = s.frequencies({2.0 * kPi * q, 0.0}, 2)[1] / q * m.shear_speed();
    EXPECT_NEAR(vl, std::sqrt(m.c11 / m.rho), 1e-8 * vl);
}

TEST(Operator, HermitianPositiveDefiniteAcoustic) {
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 128);
    const auto p = assemble_elastic_operator(cell, ElasticMaterial{}, {0.9, 0.4}, 6, 4);
    EXPECT_LT(hermiticity_residual(p.matrix_a), 1e-10 * max_abs(p.matrix_a));
    ASSERT_TRUE(p.matrix_b);
    EXPECT_LT(hermiticity_residual(*p.matrix_b), 1e-10 * max_abs(*p.matrix_b));
    Eigen::LLT<CMatrix> llt(*p.matrix_b);
    EXPECT_EQ(llt.info(), Eigen::Success);

    const ElasticSolver s(cell, ElasticMaterial{}, default_basis(cell, 6));
    const auto g = s.frequencies({0.0, 0.0}, 10);
    EXPECT_LT(g[0], 1e-6 * g[9]);
    EXPECT_LT(g[1], 1e-6 * g[9]);
    EXPECT_GT(g[2], 1e-2);
    // acoustic branches leave Gamma linearly with positive slopes
    const double dk = 0.02;
    const auto a = s.frequencies({dk, 0.0}, 2), b = s.frequencies({2.0 * dk, 0.0}, 2);
    for (int i = 0; i < 2; ++i) {
        EXPECT_GT(a[i], 0.0);
        EXPECT_NEAR(b[i] / a[i], 2.0, 0.02);
    }
}

TEST(Operator, TimeReversal) {
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 96);
    const ElasticSolver s(cell, ElasticMaterial{}, default_basis(cell, 5));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 10; ++i) {
        const Vec2 k{u(rng), u(rng)};
        EXPECT_TRUE(check_time_reversal(s.frequencies(k, 10), s.frequencies(-1.0 * k, 10), 1e-8).passed);
    }
}

TEST(Operator, StiffnessScaleCovariance) {
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 64);
    const ElasticMaterial m;
    const ElasticSolver s(cell, m, default_basis(cell, 5));
    for (double f : {0.25, 4.0}) {
        ElasticMaterial scaled = m;
        scaled.c11 *= f;
        scaled.c12 *= f;
        scaled.c44 *= f;
        const ElasticSolver t(cell, scaled, default_basis(cell, 5));
        const Vec2 k{1.2, -0.3};
        const auto a = s.frequencies(k, 8), b = t.frequencies(k, 8);
        for (int i = 0; i < 8; ++i) {
            const double wa = a[i] * ghz_factor(m, 300e-9), wb = b[i] * ghz_factor(scaled, 300e-9);
            EXPECT_NEAR(wb, std::sqrt(f) * wa, 1e-10 * wb);
        }
    }
}

TEST(Operator, RejectsBadMaterial) {
    ElasticMaterial m;
    m.c12 = m.c11;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = ElasticMaterial{};
    m.rho = 0.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = ElasticMaterial{};
    m.filler_stiffness = 0.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 64);
    m = ElasticMaterial{};
    m.c44 = -1.0;
    EXPECT_THROW(ElasticSolver(cell, m, default_basis(cell, 3)), std::invalid_argument);
}

TEST(CompleteGap, Synthetic) {
    // ranges [0.1, 0.3], [0.5, 0.6], [0.2, 0.35], [0.7, 0.8]: unsorted families, two common gaps
    const auto r = find_complete_gap(rows({{0.1, 0.5, 0.2, 0.7}, {0.3, 0.6, 0.35, 0.8}}));
    ASSERT_EQ(r.gaps.size(), 2u);
    EXPECT_DOUBLE_EQ(r.gaps[0].lower, 0.35);
    EXPECT_DOUBLE_EQ(r.gaps[0].upper, 0.5);
    EXPECT_EQ(r.gaps[0].band_below, 2);
    EXPECT_DOUBLE_EQ(r.gaps[1].lower, 0.6);
    EXPECT_DOUBLE_EQ(r.gaps[1].upper, 0.7);
    EXPECT_TRUE(find_complete_gap(rows({{0.1, 0.3}, {0.4, 0.2}})).empty());
    const auto two = find_complete_gap(rows({{0.1, 0.3, 0.5}, {0.2, 0.4, 0.6}}));
    EXPECT_EQ(two.gaps.size(), 2u);
}

TEST(Shamrock, CompleteGapAtPaperParameters) {
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 256);
    const ElasticMaterial m;
    const auto path = irbz_path(cell.lattice, 12);
    const auto images = elastic_path_images(cell, m);
    ASSERT_EQ(images.size(), 3u);
    const auto full = extended_path(cell.lattice, path, images);
    const auto bs = elastic_band_structure(cell, m, full, 10, 7);
    const auto g = find_complete_gap(bs).largest();
    ASSERT_TRUE(g);
    EXPECT_GT(g->ratio, 0.3);
    EXPECT_NEAR(g->lower, 0.4318, 5e-4);
    EXPECT_NEAR(g->upper, 0.6483, 5e-4);
    EXPECT_NEAR(g->lower_phys, g->lower * ghz_factor(m, 300e-9), 1e-12);
    EXPECT_EQ(bs.unit, "GHz");
    EXPECT_TRUE(bs.light_line.empty());

    // the bare path misses the edge of the rotated M points
    const auto bare = find_complete_gap(elastic_band_structure(cell, m, path, 10, 7)).largest();
    ASSERT_TRUE(bare);
    EXPECT_GT(bare->upper, g->upper + 0.01);

    const auto finer = elastic_band_structure(cell, m, full, 10, 10);
    EXPECT_LT(max_relative_change(bs, finer, 10), 0.015);
}

TEST(Shamrock, FillerDecadeSensitivity) {
    const auto cell = build_unit_cell(LatticeSpec{}, ShamrockHole{}, 128);
    const auto path = irbz_path(cell.lattice, 6);
    auto gap_for = [&](double filler) {
        ElasticMaterial m;
        m.filler_stiffness = filler;
        m.filler_density = filler;
        const auto full = extended_path(cell.lattice, path, elastic_path_images(cell, m));
        return *find_complete_gap(elastic_band_structure(cell, m, full, 10, 6)).largest();
    };
    const Gap base = gap_for(1e-6);
    for (double f : {1e-7, 1e-5}) {
        const Gap g = gap_for(f);
        EXPECT_NEAR(g.lower, base.lower, 1e-3 * base.lower) << f;
        EXPECT_NEAR(g.upper, base.upper, 1e-3 * base.upper) << f;
    }
}
