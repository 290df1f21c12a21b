#include "bifkit/weighted_spectrum.hpp"

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace bifkit;

TEST(WeightedSpectrum, FirstEigenvalueIsMinusOne) {
    const auto& p = fixtures::interval(1024, 10);
    ASSERT_GE(p.spectrum.size(), 1u);
    EXPECT_NEAR(p.spectrum[0].lambda, -1.0, 1e-6);
    const Eigen::VectorXd& psi = p.spectrum[0].basis.front();
    const double scale = p.disc.mesh.inner(psi, p.state.omega) / p.disc.mesh.inner(p.state.omega, p.state.omega);
    EXPECT_LE(p.disc.mesh.l2_norm(psi - scale * p.state.omega) / p.disc.mesh.l2_norm(psi), 1e-6);
}

TEST(WeightedSpectrum, IntervalClustersSimpleAndIncreasing) {
    const auto& p = fixtures::interval(512, 20);
    ASSERT_EQ(p.spectrum.size(), 20u);
    for (std::size_t k = 0; k < p.spectrum.size(); ++k) {
        EXPECT_EQ(p.spectrum[k].multiplicity, 1);
        if (k) EXPECT_GT(p.spectrum[k].lambda, p.spectrum[k - 1].lambda);
    }
    EXPECT_GT(p.spectrum[19].lambda, p.spectrum[9].lambda);
    EXPECT_GT(p.spectrum.complete_below, p.spectrum[19].lambda);
    EXPECT_TRUE(p.spectrum.ambiguous_gaps.empty());
    EXPECT_EQ(p.spectrum.k0, 2);  // -1 and a value just below 0
}

TEST(WeightedSpectrum, MatchesDenseGeneralizedSolver) {
    const auto& p = fixtures::interval(200, 12);
    const Eigen::MatrixXd a = fixtures::dense(p.disc.stiffness.matrix) - Eigen::MatrixXd(p.disc.mesh.weights().asDiagonal());
    const Eigen::VectorXd w = p.disc.mesh.weights().cwiseProduct(p.state.omega.cwiseAbs2());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(a, Eigen::MatrixXd(w.asDiagonal()));
    for (std::size_t k = 0; k < p.spectrum.size(); ++k) {
        const double e = ref.eigenvalues()[static_cast<Eigen::Index>(k)];
        EXPECT_NEAR(p.spectrum[k].lambda, e, 1e-8 * (1.0 + std::abs(e))) << k;
    }
}

TEST(WeightedSpectrum, RayleighQuotientsAndGram) {
    const auto& p = fixtures::interval(512, 20);
    const Eigen::VectorXd w = p.disc.mesh.weights().cwiseProduct(p.state.omega.cwiseAbs2());
    for (const auto& c : p.spectrum.clusters) {
        for (const auto& psi : c.basis) {
            const double rq = weighted_rayleigh_quotient(p.disc, p.state.omega, psi);
            EXPECT_NEAR(rq, c.lambda, 1e-8 * (1.0 + std::abs(c.lambda)));
            EXPECT_NEAR(p.disc.mesh.inner(psi, psi), 1.0, 1e-8);
        }
    }
    (void)w;
}

TEST(WeightedSpectrum, BallClustersAreMassOrthonormal) {
    const auto disc = make_discretization(DomainSpec::ball(6.0, 3), 300);
    const auto gs = solve_omega(disc);
    const auto spec = compute_spectrum(disc, gs, 8);
    EXPECT_NEAR(spec[0].lambda, -1.0, 1e-6);
    for (const auto& c : spec.clusters) {
        const int n = static_cast<int>(c.basis.size());
        EXPECT_EQ(n, c.multiplicity);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                EXPECT_NEAR(disc.mesh.inner(c.basis[static_cast<std::size_t>(i)], c.basis[static_cast<std::size_t>(j)]),
                            i == j ? 1.0 : 0.0, 1e-8);
            }
        }
    }
}

TEST(WeightedSpectrum, FirstEigenvalueConvergesUnderRefinement) {
    // λ_1 = -1 holds to the Newton tolerance on every mesh; the Dirichlet
    // eigenvalue the branch analysis relies on converges at second order.
    const double l1 = fixtures::interval(256, 4).spectrum[0].lambda;
    const double l2 = fixtures::interval(512, 4).spectrum[0].lambda;
    EXPECT_NEAR(l1, -1.0, 1e-8);
    EXPECT_NEAR(l2, -1.0, 1e-8);
    const double a = fixtures::interval(256, 4).spectrum[2].lambda;
    const double b = fixtures::interval(512, 4).spectrum[2].lambda;
    const double c = fixtures::interval(1024, 4).spectrum[2].lambda;
    const double rate = std::log2(std::abs(a - b) / std::abs(b - c));
    EXPECT_GE(rate, 1.8);
}

TEST(WeightedSpectrum, WindowQueries) {
    const auto& p = fixtures::interval(512, 10);
    const auto single = count_in_window(p.spectrum, -2.0, -1.0 + 1e-9);
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].k, 1);
    EXPECT_NEAR(single[0].lambda, -1.0, 1e-8);
    EXPECT_TRUE(count_in_window(p.spectrum, p.spectrum.clusters.back().lambda + 1.0, 1e9).empty());
    // Window (-1, 0): candidates for the defocusing case with three components.
    for (const auto& e : count_in_window(p.spectrum, -1.0, 0.0)) {
        EXPECT_GT(e.lambda, -1.0);
        EXPECT_LT(e.lambda, 0.0);
    }
}
