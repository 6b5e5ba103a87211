#include <gtest/gtest.h>

#include <thread>

#include "mreg/weights.hpp"
#include "test_support.hpp"

namespace mreg {
namespace {

using testing::max_abs;
using testing::random_spd;
using testing::random_vector;

TEST(MInner, IdentityIsDotProduct)
{
    const auto M = WeightMatrix::identity(2);
    EXPECT_DOUBLE_EQ(m_inner(M, Vector{{1.0, 2.0}}, Vector{{3.0, 4.0}}), 11.0);
}

TEST(MInner, SingleDiagonalEntry)
{
    const auto M = WeightMatrix::diagonal(Vector{{4.0, 1.0}});
    EXPECT_DOUBLE_EQ(m_inner(M, Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}), 4.0);
}

TEST(MInner, MatchesElementwiseSum)
{
    std::mt19937_64 gen(1);
    const Vector x = random_vector(gen, 5);
    const Vector w = testing::random_weights(gen, 5, 100.0);
    const auto M = WeightMatrix::diagonal(w);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i)
        sum += w[i] * x[i] * x[i];
    EXPECT_NEAR(m_inner(M, x, x), sum, 1e-14 * sum);
}

TEST(MInner, SymmetricAndRejectsMismatch)
{
    std::mt19937_64 gen(2);
    const auto M = WeightMatrix::dense(random_spd(gen, 6, 50.0));
    const Vector x = random_vector(gen, 6), y = random_vector(gen, 6);
    EXPECT_NEAR(m_inner(M, x, y), m_inner(M, y, x), 1e-13 * x.norm() * y.norm() * 50.0);
    EXPECT_THROW(m_inner(M, x, Vector::Ones(5)), std::invalid_argument);
}

TEST(MNorm, ZeroAndOneDimensional)
{
    EXPECT_EQ(m_norm(WeightMatrix::identity(3), Vector::Zero(3)), 0.0);
    EXPECT_DOUBLE_EQ(m_norm(WeightMatrix::diagonal(Vector{{4.0}}), Vector{{3.0}}), 6.0);
}

TEST(MNorm, EqualsFactorTimesVector)
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto M = WeightMatrix::dense(random_spd(gen, 8, 1e3));
        const Vector x = random_vector(gen, 8);
        const double via_factor = (factor(M).triangularView<Eigen::Lower>() * x).norm();
        EXPECT_NEAR(m_norm(M, x), via_factor, 1e-12 * via_factor);
        EXPECT_NEAR(m_norm(M, x) * m_norm(M, x), m_inner(M, x, x), 1e-12 * m_inner(M, x, x));
    }
}

TEST(SolveM, IdentityAndDiagonal)
{
    const Vector v{{1.5, -2.0, 7.0}};
    EXPECT_EQ(solve_m(WeightMatrix::identity(3), v), v);
    const Vector w = solve_m(WeightMatrix::diagonal(Vector{{2.0, 5.0}}), Vector{{4.0, 10.0}});
    EXPECT_DOUBLE_EQ(w[0], 2.0);
    EXPECT_DOUBLE_EQ(w[1], 2.0);
}

TEST(SolveM, DenseMultiplyBack)
{
    std::mt19937_64 gen(4);
    const Matrix Md = random_spd(gen, 6, 1e3);
    const auto M = WeightMatrix::dense(Md);
    const Vector v = random_vector(gen, 6);
    const Vector w = solve_m(M, v);
    EXPECT_LT((Md * w - v).norm(), 1e-12 * v.norm());
    EXPECT_LT((M.apply(w) - v).norm(), 1e-12 * v.norm());
}

TEST(Factor, IdentityAndSquareRoots)
{
    EXPECT_EQ(factor(WeightMatrix::identity(3)), Matrix::Identity(3, 3));
    const Matrix L = factor(WeightMatrix::dense(Vector{{4.0, 9.0}}.asDiagonal().toDenseMatrix()));
    EXPECT_NEAR(L(0, 0), 2.0, 1e-15);
    EXPECT_NEAR(L(1, 1), 3.0, 1e-15);
    EXPECT_EQ(L(0, 1), 0.0);
    EXPECT_EQ(L(1, 0), 0.0);
    const Matrix Ld = factor(WeightMatrix::diagonal(Vector{{4.0, 9.0}}));
    EXPECT_EQ(Ld(0, 0), 2.0);
    EXPECT_EQ(Ld(1, 1), 3.0);
}

TEST(Factor, ReassemblyAndConvention)
{
    std::mt19937_64 gen(5);
    for (int n : {1, 2, 5, 17, 40}) {
        const Matrix G = testing::random_matrix(gen, n, n);
        const Matrix Md = G.transpose() * G + n * Matrix::Identity(n, n);
        const auto M = WeightMatrix::dense(Md);
        const Matrix& L = factor(M);
        EXPECT_TRUE(L.isLowerTriangular());
        EXPECT_LE(max_abs(L.transpose() * L - Md), 1e-12 * max_abs(Md)) << "n=" << n;
    }
}

TEST(Factor, ApplyAndSolveFactorAreInverse)
{
    std::mt19937_64 gen(6);
    const auto M = WeightMatrix::dense(random_spd(gen, 12, 1e3));
    const Vector x = random_vector(gen, 12);
    EXPECT_LT((M.solve_factor(M.apply_factor(x)) - x).norm(), 1e-12 * x.norm());
    const Matrix A = testing::random_matrix(gen, 7, 12);
    const Matrix C = M.right_solve_factor(A);
    EXPECT_LT(max_abs(C * factor(M) - A), 1e-12 * max_abs(A) * 1e2);
}

TEST(Factor, NotPositiveDefiniteNamesPivot)
{
    Matrix Md = Matrix::Identity(4, 4);
    Md(2, 2) = -1.0;
    try {
        WeightMatrix::dense(Md);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const NotPositiveDefinite& e) {
        EXPECT_EQ(e.pivot(), 2);
        EXPECT_NE(std::string(e.what()).find("not positive definite"), std::string::npos);
    }
    EXPECT_THROW(WeightMatrix::diagonal(Vector{{1.0, 0.0, 2.0}}), NotPositiveDefinite);
    EXPECT_THROW(WeightMatrix::dense(Matrix::Identity(2, 3)), std::invalid_argument);
}

TEST(Factor, DenseSymmetrizesInput)
{
    Matrix Md{{2.0, 1.0}, {1.0 + 1e-14, 3.0}};
    const auto M = WeightMatrix::dense(Md);
    const Matrix S = M.to_dense();
    EXPECT_EQ(S(0, 1), S(1, 0));
}

TEST(WeightMatrix, DiagonalAndDenseAgree)
{
    std::mt19937_64 gen(7);
    const Vector w = testing::random_weights(gen, 9, 1e4);
    const auto Md = WeightMatrix::diagonal(w);
    const auto Mf = WeightMatrix::dense(w.asDiagonal().toDenseMatrix());
    for (int trial = 0; trial < 20; ++trial) {
        const Vector x = random_vector(gen, 9), y = random_vector(gen, 9);
        const double a = m_inner(Md, x, y), b = m_inner(Mf, x, y);
        EXPECT_NEAR(a, b, 1e-13 * m_norm(Md, x) * m_norm(Md, y));
        EXPECT_NEAR(m_norm(Md, x), m_norm(Mf, x), 1e-13 * m_norm(Md, x));
        const Vector sd = solve_m(Md, x), sf = solve_m(Mf, x);
        EXPECT_LE((sd - sf).norm(), 1e-13 * sd.norm());
    }
}

TEST(WeightMatrix, NearSingularIsFlaggedNotRejected)
{
    const auto M = WeightMatrix::diagonal(Vector{{1.0, 1e-14}});
    EXPECT_TRUE(M.near_singular());
    EXPECT_FALSE(WeightMatrix::diagonal(Vector{{1.0, 2.0}}).near_singular());
    EXPECT_NEAR(M.condition_estimate(), 1e14, 1e2);
}

TEST(WeightMatrix, ConcurrentFirstFactorAccessIsConsistent)
{
    std::mt19937_64 gen(8);
    const auto M = WeightMatrix::diagonal(testing::random_weights(gen, 300, 10.0));
    std::vector<const Matrix*> seen(4, nullptr);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] { seen[t] = &factor(M); });
    for (auto& th : threads)
        th.join();
    for (int t = 1; t < 4; ++t)
        EXPECT_EQ(seen[t], seen[0]);
    EXPECT_LE(max_abs(seen[0]->transpose() * *seen[0] - M.to_dense()), 1e-15 * 10.0);
}

}  // namespace
}  // namespace mreg
