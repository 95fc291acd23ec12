#include "fomas/topology.hpp"

#include <random>

#include <gtest/gtest.h>

namespace fomas {
namespace topology {
namespace {

using linalg::FromRows;
using linalg::Kron;

Matrix Ring3() { return FromRows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}); }
Matrix Chords4() { return FromRows({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}}); }

Matrix Random(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  }
  return m;
}

// Strongly connected random digraph: a directed ring plus random chords.
Matrix RandomAdjacency(int N, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::Zero(N, N);
  for (int i = 0; i < N; ++i) a(i, (i + 1) % N) = 0.5 + u(rng);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i != j && u(rng) < 0.3) a(i, j) = u(rng);
    }
  }
  return a;
}

GTEST_TEST(LaplacianTest, PublishedGraphs) {
  EXPECT_EQ(Laplacian(DirectedGraph(Ring3())), FromRows({{1, -1, 0}, {0, 1, -1}, {-1, 0, 1}}));
  EXPECT_EQ(Laplacian(DirectedGraph(Chords4())),
            FromRows({{2, -1, 0, -1}, {-1, 2, -1, 0}, {0, -1, 2, -1}, {-1, 0, -1, 2}}));
  EXPECT_TRUE(Laplacian(DirectedGraph(Matrix::Zero(2, 2))).isZero(0.0));
}

GTEST_TEST(LaplacianTest, InvalidGraphsRejected) {
  EXPECT_THROW(DirectedGraph(FromRows({{1, 0}, {0, 0}})), std::invalid_argument);
  EXPECT_THROW(DirectedGraph(FromRows({{0, -1}, {1, 0}})), std::invalid_argument);
  EXPECT_THROW(DirectedGraph(Matrix::Zero(2, 3)), std::invalid_argument);
}

GTEST_TEST(LaplacianTest, RowSumsVanish) {
  std::mt19937 rng(4);
  for (int N = 2; N <= 6; ++N) {
    const Matrix L = Laplacian(DirectedGraph(RandomAdjacency(N, rng)));
    EXPECT_LT((L * linalg::Ones(N)).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Matrix L = Laplacian(DirectedGraph(Chords4()));
  EXPECT_TRUE((L * linalg::Ones(4)).isZero(0.0));
}

GTEST_TEST(ReduceTest, PmsmRing) {
  const LaplacianBundle b = Reduce(Laplacian(DirectedGraph(Ring3())));
  EXPECT_EQ(b.dropped_row, 2);
  EXPECT_EQ(b.L_hat, FromRows({{1, -1, 0}, {0, 1, -1}}));
  EXPECT_LT((b.Gamma() - FromRows({{1, 0}, {0, 1}, {-1, -1}})).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((b.L_hat * b.L_hat_pinv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

GTEST_TEST(ReduceTest, NumericGraphFullRowRank) {
  const LaplacianBundle b = Reduce(Laplacian(DirectedGraph(Chords4())));
  EXPECT_EQ(linalg::Rank(b.L_hat), 3);
}

GTEST_TEST(ReduceTest, NoSpanningTreeRejected) {
  // Agent 2 listens to agent 1; dropping row 2 leaves [0, 0].
  const Matrix L = Laplacian(DirectedGraph(FromRows({{0, 0}, {1, 0}})));
  EXPECT_THROW(Reduce(L, 1), SpanningTreeError);
  EXPECT_THROW(Reduce(Laplacian(DirectedGraph(Matrix::Zero(3, 3)))), SpanningTreeError);
}

GTEST_TEST(ReduceTest, GammaStructureOnRandomBalancedGraphs) {
  std::mt19937 rng(9);
  for (int N = 2; N <= 6; ++N) {
    Matrix a = RandomAdjacency(N, rng);
    a = a + a.transpose().eval();  // undirected, hence balanced
    const LaplacianBundle b = Reduce(Laplacian(DirectedGraph(a)));
    Matrix expected(N, N - 1);
    expected << Matrix::Identity(N - 1, N - 1), -linalg::Ones(N - 1).transpose();
    EXPECT_LT((b.Gamma() - expected).cwiseAbs().maxCoeff(), 1e-10) << "N = " << N;
  }
}

GTEST_TEST(LiftTest, KroneckerIdentity) {
  const Matrix L = Laplacian(DirectedGraph(Ring3()));
  EXPECT_EQ(Lift(L, 1), L);
  EXPECT_EQ(Lift(L, 2).rows(), 6);
  const Matrix L_hat = Reduce(L).L_hat;
  const Matrix lifted = Lift(L_hat, 2);
  EXPECT_LT((lifted * linalg::Pinv(lifted) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((linalg::Pinv(lifted) - Lift(linalg::Pinv(L_hat), 2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(Lift(L, 0), std::invalid_argument);
}

GTEST_TEST(LiftTest, CommutationIdentities) {
  std::mt19937 rng(17);
  for (int N = 2; N <= 5; ++N) {
    for (int n = 1; n <= 3; ++n) {
      for (int p = 1; p <= 3; ++p) {
        const Matrix L = Laplacian(DirectedGraph(RandomAdjacency(N, rng)));
        const Matrix C = Random(p, n, rng);
        const Matrix A = Random(n, n, rng);
        const Matrix C_N = Kron(Matrix::Identity(N, N), C);
        const Matrix A_N = Kron(Matrix::Identity(N, N), A);
        EXPECT_LT((Lift(L, p) * C_N - C_N * Lift(L, n)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((Lift(L, n) * A_N - A_N * Lift(L, n)).cwiseAbs().maxCoeff(), 1e-12);

        // The reduced state matrix is I_{N-1} ⊗ Ã.
        const LaplacianBundle b = Reduce(L);
        const Matrix reduced = Lift(b.L_hat, n) * A_N * Lift(b.L_hat_pinv, n);
        EXPECT_LT((reduced - Kron(Matrix::Identity(N - 1, N - 1), A)).cwiseAbs().maxCoeff(), 1e-10);
      }
    }
  }
}

GTEST_TEST(SpanningTreeTest, Examples) {
  EXPECT_TRUE(HasSpanningTree(DirectedGraph(Ring3())));
  EXPECT_FALSE(HasSpanningTree(DirectedGraph(Matrix::Zero(2, 2))));
  // Star rooted at vertex 1: every other vertex listens to vertex 1.
  EXPECT_TRUE(HasSpanningTree(DirectedGraph(FromRows({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}}))));
  // Two roots that nobody else connects.
  EXPECT_FALSE(HasSpanningTree(DirectedGraph(FromRows({{0, 0, 0}, {0, 0, 0}, {1, 1, 0}}))));
}

}  // namespace
}  // namespace topology
}  // namespace fomas
