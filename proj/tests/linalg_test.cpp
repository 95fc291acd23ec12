#include "fomas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

namespace fomas {
namespace linalg {
namespace {

Matrix Random(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  }
  return m;
}

std::vector<double> SortedReal(const Spectrum& s) {
  std::vector<double> out;
  for (const auto& z : s.eigenvalues) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

GTEST_TEST(KronTest, SmallExamples) {
  const Matrix a = FromRows({{1, 2}, {3, 4}});
  const Matrix expected = FromRows({{1, 0, 2, 0}, {0, 1, 0, 2}, {3, 0, 4, 0}, {0, 3, 0, 4}});
  EXPECT_TRUE(Kron(a, Matrix::Identity(2, 2)).isApprox(expected, 0.0));
  EXPECT_EQ(Kron(Matrix::Identity(1, 1), a), a);
  EXPECT_EQ(Kron(Matrix::Identity(3, 3), FromRows({{2}})).rows(), 3);
}

GTEST_TEST(KronTest, MixedProductAndAssociativity) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = Random(2, 3, rng), B = Random(3, 2, rng);
    const Matrix C = Random(3, 2, rng), D = Random(2, 3, rng);
    const Matrix lhs = Kron(A, B) * Kron(C, D);
    const Matrix rhs = Kron(A * C, B * D);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);

    const Matrix E = Random(2, 2, rng);
    EXPECT_LT((Kron(Kron(A, B), E) - Kron(A, Kron(B, E))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

GTEST_TEST(HadamardTest, BlockFormLowersToEntrywise) {
  const Matrix pattern = FromRows({{1, -1}, {0, 2}});
  std::mt19937 rng(3);
  const Matrix blocks = Random(4, 6, rng);
  const Matrix out = HadamardBlocks(pattern, blocks);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 6; ++c) {
      EXPECT_DOUBLE_EQ(out(r, c), pattern(r / 2, c / 3) * blocks(r, c));
    }
  }
  EXPECT_THROW(HadamardBlocks(pattern, Random(5, 6, rng)), DimensionError);
  EXPECT_THROW(Hadamard(Random(2, 2, rng), Random(2, 3, rng)), DimensionError);
}

GTEST_TEST(SymTest, Examples) {
  EXPECT_EQ(Sym(Matrix::Identity(2, 2)), 2.0 * Matrix::Identity(2, 2));
  EXPECT_EQ(Sym(FromRows({{0, 1}, {0, 0}})), FromRows({{0, 1}, {1, 0}}));
  EXPECT_EQ(Sym(FromRows({{1}}))(0, 0), 2.0);
  std::mt19937 rng(5);
  const Matrix s = Sym(Random(5, 5, rng));
  EXPECT_TRUE((s - s.transpose()).isZero(0.0));
}

GTEST_TEST(PinvTest, Examples) {
  EXPECT_TRUE(Pinv(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3), 1e-14));
  EXPECT_TRUE(Pinv(Matrix::Zero(2, 3)).isZero(0.0));
  EXPECT_EQ(Pinv(Matrix::Zero(2, 3)).rows(), 3);

  const Matrix L_hat = FromRows({{1, -1, 0}, {0, 1, -1}});
  const Matrix L = FromRows({{1, -1, 0}, {0, 1, -1}, {-1, 0, 1}});
  const Matrix expected = FromRows({{1, 0}, {0, 1}, {-1, -1}});
  EXPECT_LT((L * Pinv(L_hat) - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((L_hat * Pinv(L_hat) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

GTEST_TEST(PinvTest, MoorePenroseConditions) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    // Rank-deficient 5x4 products as well as full-rank shapes.
    const Matrix a = trial % 2 ? Random(5, 2, rng) * Random(2, 4, rng) : Random(3, 5, rng);
    const Matrix ap = Pinv(a);
    EXPECT_LT((a * ap * a - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((ap * a * ap - ap).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix aap = a * ap, apa = ap * a;
    EXPECT_LT((aap - aap.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((apa - apa.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_EQ(Rank(Random(5, 2, rng) * Random(2, 4, rng)), 2);
}

GTEST_TEST(EigTest, Examples) {
  const Spectrum diag = Eig(FromRows({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}));
  const std::vector<double> d = SortedReal(diag);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], 1, 1e-12);
  EXPECT_NEAR(d[1], 2, 1e-12);
  EXPECT_NEAR(d[2], 3, 1e-12);

  const Spectrum motor = Eig(FromRows({{0, 1}, {-1282, -124.3}}));
  const double disc = std::sqrt(124.3 * 124.3 - 4 * 1282);
  const std::vector<double> m = SortedReal(motor);
  EXPECT_NEAR(m[0], (-124.3 - disc) / 2, 1e-9);
  EXPECT_NEAR(m[1], (-124.3 + disc) / 2, 1e-9);
  EXPECT_NEAR(m[1], -11.35, 0.01);
  EXPECT_NEAR(m[0], -112.95, 0.01);

  const Spectrum rot = Eig(FromRows({{0, 1}, {-1, 0}}));
  ASSERT_EQ(rot.eigenvalues.size(), 2u);
  for (const auto& z : rot.eigenvalues) {
    EXPECT_NEAR(z.real(), 0, 1e-12);
    EXPECT_NEAR(std::abs(z.imag()), 1, 1e-12);
  }
  EXPECT_TRUE(rot.IsConjugateClosed());
  EXPECT_THROW(Eig(Matrix::Zero(2, 3)), DimensionError);
}

GTEST_TEST(EigTest, TraceAndDeterminant) {
  std::mt19937 rng(8);
  for (int n = 1; n <= 20; n += 3) {
    const Matrix a = Random(n, n, rng);
    const Spectrum s = Eig(a);
    std::complex<double> sum = 0, prod = 1;
    for (const auto& z : s.eigenvalues) {
      sum += z;
      prod *= z;
    }
    EXPECT_NEAR(sum.real(), a.trace(), 1e-8 * std::max(1.0, std::abs(a.trace())));
    EXPECT_NEAR(sum.imag(), 0, 1e-8);
    const double det = a.determinant();
    EXPECT_NEAR(prod.real(), det, 1e-8 * std::max(1.0, std::abs(det)));
    EXPECT_TRUE(s.IsConjugateClosed());
  }
}

GTEST_TEST(SymEigTest, Examples) {
  EXPECT_NEAR(SymEigMin(Matrix::Identity(3, 3)), 1, 1e-12);
  EXPECT_NEAR(SymEigMin(FromRows({{2, 1}, {1, 2}})), 1, 1e-12);
  EXPECT_NEAR(SymEigMax(FromRows({{2, 1}, {1, 2}})), 3, 1e-12);
  const Matrix J = Matrix::Identity(3, 3);
  EXPECT_NEAR(SymEigMin(-Sym(J) - 0.5 * Matrix::Identity(3, 3)), -2.5, 1e-12);
  EXPECT_THROW(SymEigMin(FromRows({{1, 2}, {0, 1}})), DimensionError);
}

GTEST_TEST(BlockDiagTest, ZeroSizeBlocks) {
  const Matrix out = BlockDiag({FromRows({{1}}), Matrix::Zero(0, 0), FromRows({{2, 3}})});
  EXPECT_EQ(out.rows(), 2);
  EXPECT_EQ(out.cols(), 3);
  EXPECT_EQ(out, FromRows({{1, 0, 0}, {0, 2, 3}}));
}

GTEST_TEST(FromRowsTest, RaggedRowsRejected) {
  EXPECT_THROW(FromRows({{1, 2}, {3}}), DimensionError);
  EXPECT_NEAR(SpectralNorm(FromRows({{3, 0}, {0, -4}})), 4, 1e-12);
}

}  // namespace
}  // namespace linalg
}  // namespace fomas
