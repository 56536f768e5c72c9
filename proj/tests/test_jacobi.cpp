#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "triage/error.hpp"
#include "triage/jacobi.hpp"

using namespace triage;

namespace {

double reconstruction_residual(const Matrix& s, const EigenDecomposition& e) {
    const std::size_t n = s.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += e.vectors(k, i) * e.values[k] * e.vectors(k, j);
            worst = std::max(worst, std::fabs(acc - s(i, j)));
        }
    return worst;
}

double orthonormality_residual(const EigenDecomposition& e) {
    const std::size_t n = e.values.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::fabs(dot(e.vectors.row(i), e.vectors.row(j)) - (i == j ? 1.0 : 0.0)));
    return worst;
}

} // namespace

TEST(Jacobi, IdentityGivesIdentityBasis) {
    const auto e = eig_sym(Matrix::identity(16));
    for (double v : e.values) EXPECT_EQ(v, 1.0);
    EXPECT_EQ(e.vectors, Matrix::identity(16));
    EXPECT_EQ(e.sweeps, 0);
}

TEST(Jacobi, AnalyticTwoByTwoBlock) {
    Matrix s(16, 16);
    s(0, 0) = 2;
    s(1, 1) = 2;
    s(0, 1) = 1;
    s(1, 0) = 1;
    const auto e = eig_sym(s);
    EXPECT_NEAR(e.values[0], 3.0, 1e-12);
    EXPECT_NEAR(e.values[1], 1.0, 1e-12);
    for (std::size_t k = 2; k < 16; ++k) EXPECT_NEAR(e.values[k], 0.0, 1e-12);
    EXPECT_NEAR(e.vectors(0, 0), 1.0 / std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(e.vectors(0, 1), 1.0 / std::sqrt(2.0), 1e-9);
    for (std::size_t k = 2; k < 16; ++k) EXPECT_EQ(e.vectors(0, k), 0.0);
}

TEST(Jacobi, RandomMatricesSatisfyResidualBounds) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix s = testutil::to_matrix(oracle::random_symmetric(16, rng));
        const auto e = eig_sym(s);
        EXPECT_LT(reconstruction_residual(s, e), 1e-9);
        EXPECT_LT(orthonormality_residual(e), 1e-8);
        EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
    }
}

TEST(Jacobi, SignConventionLargestComponentPositive) {
    std::mt19937_64 rng(23);
    const auto e = eig_sym(testutil::to_matrix(oracle::random_symmetric(8, rng)));
    for (std::size_t j = 0; j < 8; ++j) {
        auto v = e.vectors.row(j);
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
        EXPECT_GT(v[best], 0.0);
    }
    std::vector<double> tie = {-0.5, 0.5, 0.1};
    apply_sign_convention(tie);
    EXPECT_EQ(tie[0], 0.5);
}

TEST(Jacobi, CubicOracleOnThreeByThree) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = oracle::random_symmetric(3, rng);
        const auto expected = oracle::cubic_eigenvalues(g);
        const auto e = eig_sym(testutil::to_matrix(g));
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(e.values[k], expected[k], 1e-8);
    }
}

TEST(Jacobi, BisectionOracleOnFourByFour) {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = oracle::random_symmetric(4, rng);
        const auto expected = oracle::bisection_eigenvalues(g);
        if (expected.size() != 4) continue;   // roots too close for the scan
        const auto e = eig_sym(testutil::to_matrix(g));
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.values[k], expected[k], 1e-8);
        ++checked;
    }
    EXPECT_GE(checked, 35);
}

TEST(Jacobi, TiesKeepInputOrder) {
    Matrix s(3, 3);
    s(0, 0) = 1;
    s(1, 1) = 5;
    s(2, 2) = 1;
    const auto e = eig_sym(s);
    EXPECT_EQ(e.values, (std::vector<double>{5, 1, 1}));
    EXPECT_EQ(e.vectors(0, 1), 1.0);
    EXPECT_EQ(e.vectors(1, 0), 1.0);
    EXPECT_EQ(e.vectors(2, 2), 1.0);
}

TEST(Jacobi, RejectsNonSymmetric) {
    Matrix s = Matrix::identity(3);
    s(0, 2) = 1e-6;
    EXPECT_THROW(eig_sym(s), std::invalid_argument);
    EXPECT_THROW(eig_sym(Matrix(2, 3)), std::invalid_argument);
}

TEST(Jacobi, ReportsNonConvergence) {
    std::mt19937_64 rng(37);
    const Matrix s = testutil::to_matrix(oracle::random_symmetric(10, rng));
    JacobiOptions opts;
    opts.max_sweeps = 1;
    EXPECT_THROW(eig_sym(s, opts), NumericError);
}
