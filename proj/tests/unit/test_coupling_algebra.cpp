#include "bifkit/coupling_algebra.hpp"
#include "bifkit/error.hpp"

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace bifkit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

// Random β inside the branch interval.
double sample_beta(std::mt19937_64& rng, const CouplingConfig& c) {
    const auto iv = branch_interval(c);
    std::uniform_int_distribution<std::size_t> pick(0, iv.size() - 1);
    const OpenInterval& i = iv[pick(rng)];
    std::uniform_real_distribution<double> u(0.02, 0.98);
    if (std::isfinite(i.lo)) return i.lo + u(rng) * (i.hi - i.lo);
    std::uniform_real_distribution<double> e(-3.0, 3.0);
    return i.hi - std::pow(10.0, e(rng));
}

// Plain summation oracle for g.
double g_naive(const std::vector<double>& mu, double beta) {
    long double s = 0.0L;
    for (double m : mu) s += 1.0L / (static_cast<long double>(m) - beta);
    return static_cast<double>(1.0L + beta * s);
}

}  // namespace

TEST(CouplingAlgebra, Classification) {
    EXPECT_EQ(classify(CouplingConfig({1, 2, 3})).kind, CaseKind::Focusing);
    EXPECT_EQ(classify(CouplingConfig({-3, -2, -1})).kind, CaseKind::Defocusing);
    const CaseInfo m = classify(CouplingConfig({-2, -1, 3, 4}));
    EXPECT_EQ(m.kind, CaseKind::Mixed);
    EXPECT_EQ(m.split, 2);
    EXPECT_EQ(code_of([] { classify(CouplingConfig({-1, 0, 2})); }), ErrorCode::DegenerateCoupling);
    EXPECT_EQ(code_of([] { CouplingConfig({1, 2}); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { CouplingConfig({3, 2, 1}); }), ErrorCode::InvalidConfig);
}

TEST(CouplingAlgebra, GValues) {
    EXPECT_EQ(g(CouplingConfig({1, 2, 3}), 0.0), 1.0);
    EXPECT_DOUBLE_EQ(g(CouplingConfig({1, 1, 1}), -1.0), -0.5);
    EXPECT_NEAR(g(CouplingConfig({1, 2, 3}), -1e9), -2.0, 1e-8);
    EXPECT_NEAR(g(CouplingConfig({1, 2, 3}), 1e9), -2.0, 1e-8);
    EXPECT_EQ(code_of([] { g(CouplingConfig({1, 2, 3}), 2.0); }), ErrorCode::PoleAtMu);
}

TEST(CouplingAlgebra, FValuesAndAsymptotes) {
    EXPECT_DOUBLE_EQ(f(CouplingConfig({1, 1, 1}), -1.0), 3.0);
    EXPECT_NEAR(f(CouplingConfig({1, 2, 3}), -1e8), 0.0, 1e-6);
    EXPECT_NEAR(f(CouplingConfig({-3, -2, -1}), -1e8), 0.0, 1e-6);
    for (int n = 3; n <= 6; ++n) {
        EXPECT_DOUBLE_EQ(f_asymptote(n), -1.0 + 2.0 / (n - 1));
        EXPECT_DOUBLE_EQ(f_asymptote(n), (3.0 - n) / (n - 1.0));
    }
    const CouplingConfig c({1, 1, 1});
    EXPECT_EQ(code_of([&] { f(c, beta_bar(c)); }), ErrorCode::PoleAtBetaBar);
}

TEST(CouplingAlgebra, CompensatedSumMatchesExtendedPrecision) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + trial % 4;
        const CouplingConfig c(fixtures::random_mu(rng, n, trial % (n + 1)));
        const double b = sample_beta(rng, c);
        const double ref = g_naive(c.mu(), b);
        EXPECT_NEAR(g(c, b), ref, 1e-14 * std::max(1.0, std::abs(ref)));
    }
}

TEST(CouplingAlgebra, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const CouplingConfig c(fixtures::random_mu(rng, 4, trial % 5));
        const double b = sample_beta(rng, c);
        const double h = 1e-6 * std::max(1.0, std::abs(b));
        const double gp = (g(c, b + h) - g(c, b - h)) / (2 * h);
        EXPECT_NEAR(g_prime(c, b), gp, 1e-5 * (1.0 + std::abs(gp)));
        const double fp = (f(c, b + h) - f(c, b - h)) / (2 * h);
        EXPECT_NEAR(f_prime(c, b), fp, 1e-5 * (1.0 + std::abs(fp)));
    }
}

TEST(CouplingAlgebra, BetaBar) {
    EXPECT_NEAR(beta_bar(CouplingConfig({1, 1, 1})), -0.5, 1e-15);
    EXPECT_NEAR(beta_bar(CouplingConfig({2, 2, 2, 2})), -2.0 / 3.0, 1e-15);
    const CouplingConfig d({-3, -2, -1});
    const double bb = beta_bar(d);
    EXPECT_GT(bb, -1.0);
    EXPECT_NEAR(g(d, bb), 0.0, 1e-13);
    EXPECT_NEAR(bb, 0.879385241571816768, 1e-14);
    EXPECT_NEAR(beta_bar(CouplingConfig({1, 2, 3})), -0.879385241571816768, 1e-14);
    EXPECT_EQ(code_of([] { beta_bar(CouplingConfig({-1, 1, 2})); }), ErrorCode::NotApplicable);
}

TEST(CouplingAlgebra, BranchIntervals) {
    const auto f1 = branch_interval(CouplingConfig({1, 1, 1}));
    ASSERT_EQ(f1.size(), 1u);
    EXPECT_TRUE(std::isinf(f1[0].lo));
    EXPECT_NEAR(f1[0].hi, -0.5, 1e-15);

    const CouplingConfig d({-3, -2, -1});
    const auto d1 = branch_interval(d);
    ASSERT_EQ(d1.size(), 2u);
    EXPECT_EQ(d1[0].hi, -3.0);
    EXPECT_EQ(d1[1].lo, -1.0);
    EXPECT_EQ(d1[1].hi, beta_bar(d));

    const auto m1 = branch_interval(CouplingConfig({-1, 1, 2}));
    ASSERT_EQ(m1.size(), 1u);
    EXPECT_EQ(m1[0].hi, -1.0);
}

TEST(CouplingAlgebra, SynchronizationConditionOnInterval) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + trial % 3;
        const CouplingConfig c(fixtures::random_mu(rng, n, trial % (n + 1)));
        EXPECT_TRUE(synchronization_condition(c, sample_beta(rng, c)));
    }
}

TEST(CouplingAlgebra, MixedFailsAboveMu1) {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 50; ++trial) {
        const CouplingConfig c(fixtures::random_mu(rng, 4, 1 + trial % 3));
        ASSERT_EQ(classify(c).kind, CaseKind::Mixed);
        std::uniform_real_distribution<double> u(c.mu().front() + 1e-6, c.mu().back() + 10.0);
        for (int s = 0; s < 20; ++s) EXPECT_FALSE(synchronization_condition(c, u(rng)));
    }
}

TEST(CouplingAlgebra, BranchPointExamples) {
    const BranchPoint p = branch_point(CouplingConfig({1, 1, 1}), -1.0);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(p.alphas[j], 1.0, 1e-15);
    EXPECT_EQ(code_of([] { branch_point(CouplingConfig({1, 2, 3}), 0.0); }), ErrorCode::OutsideBranchInterval);
}

TEST(CouplingAlgebra, BranchIdentityHolds) {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + trial % 3;
        const CouplingConfig c(fixtures::random_mu(rng, n, trial % (n + 1)));
        const BranchPoint p = branch_point(c, sample_beta(rng, c));
        EXPECT_LE(branch_identity_residual(c, p).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(CouplingAlgebra, LinearizationExample) {
    const CouplingConfig c({1, 1, 1});
    const Eigen::MatrixXd m = linearization(c, branch_point(c, -1.0));
    Eigen::Matrix3d expected;
    expected << 1, -2, -2, -2, 1, -2, -2, -2, 1;
    EXPECT_LE((m - expected).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_NEAR(es.eigenvalues()[0], -3.0, 1e-13);
    EXPECT_NEAR(es.eigenvalues()[1], 3.0, 1e-13);
    EXPECT_NEAR(es.eigenvalues()[2], 3.0, 1e-13);
}

TEST(CouplingAlgebra, LinearizationEigenstructureRandomized) {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + trial % 3;
        const CouplingConfig c(fixtures::random_mu(rng, n, trial % (n + 1)));
        const double b = sample_beta(rng, c);
        const BranchPoint p = branch_point(c, b);
        const Eigen::MatrixXd m = linearization(c, p);
        // -3 with eigenvector α.
        EXPECT_LE((m * p.alphas + 3.0 * p.alphas).norm(), 1e-10 * (1.0 + m.norm()) * p.alphas.norm());
        // f(β) on the complement of α.
        const Eigen::MatrixXd basis = kernel_direction_basis(c, p);
        ASSERT_EQ(basis.cols(), n - 1);
        EXPECT_LE((basis.transpose() * basis - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm(), 1e-12);
        EXPECT_LE((basis.transpose() * p.alphas).norm(), 1e-12 * p.alphas.norm());
        EXPECT_LE((m * basis - p.f_value * basis).norm(), 1e-10 * (1.0 + m.norm()));
    }
}

TEST(CouplingAlgebra, KernelBasisForEqualCoefficients) {
    const CouplingConfig c({1, 1, 1});
    const Eigen::MatrixXd basis = kernel_direction_basis(c, branch_point(c, -1.0));
    // Same span as {(1,-1,0)/√2, (1,1,-2)/√6}: projector onto the complement of (1,1,1).
    const Eigen::Matrix3d proj = basis * basis.transpose();
    const Eigen::Matrix3d expected = Eigen::Matrix3d::Identity() - Eigen::Matrix3d::Constant(1.0 / 3.0);
    EXPECT_LE((proj - expected).norm(), 1e-14);
}

TEST(CouplingAlgebra, MonotoneOnInterval) {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 100; ++trial) {
        const CouplingConfig foc(fixtures::random_mu(rng, 3 + trial % 3, 0));
        EXPECT_GT(f_prime(foc, sample_beta(rng, foc)), 0.0);
        const CouplingConfig def(fixtures::random_mu(rng, 3 + trial % 3, 3 + trial % 3));
        std::uniform_real_distribution<double> e(-3.0, 3.0);
        EXPECT_LT(f_prime(def, def.mu().front() - std::pow(10.0, e(rng))), 0.0);
    }
}
