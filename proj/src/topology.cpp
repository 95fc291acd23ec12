#include "fomas/topology.hpp"

#include <string>
#include <vector>

namespace fomas {
namespace topology {

DirectedGraph::DirectedGraph(Matrix adjacency) : adjacency_(std::move(adjacency)) {
  linalg::RequireSquare(adjacency_, "DirectedGraph");
  linalg::RequireFinite(adjacency_, "DirectedGraph");
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_(i, i) != 0.0) {
      throw std::invalid_argument("DirectedGraph: nonzero self-loop weight at " +
                                  std::to_string(i));
    }
    for (Eigen::Index j = 0; j < adjacency_.cols(); ++j) {
      if (adjacency_(i, j) < 0.0) {
        throw std::invalid_argument("DirectedGraph: negative edge weight");
      }
    }
  }
}

Matrix Laplacian(const DirectedGraph& g) {
  const Matrix& a = g.adjacency();
  Matrix L = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) L(i, i) = a.row(i).sum();
  return L;
}

LaplacianBundle Reduce(const Matrix& L, int dropped_row) {
  linalg::RequireSquare(L, "Reduce()");
  const int n = static_cast<int>(L.rows());
  if (n < 2) throw DimensionError("Reduce(): need at least two agents");
  if (dropped_row < 0) dropped_row = n - 1;
  if (dropped_row >= n) throw DimensionError("Reduce(): row index out of range");

  LaplacianBundle out;
  out.L = L;
  out.dropped_row = dropped_row;
  out.L_hat.resize(n - 1, n);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i == dropped_row) continue;
    out.L_hat.row(r++) = L.row(i);
  }
  if (linalg::Rank(out.L_hat) != n - 1) {
    throw SpanningTreeError(
        "Reduce(): reduced Laplacian is rank deficient (no spanning tree, "
        "transformation invalid)");
  }
  out.L_hat_pinv = linalg::Pinv(out.L_hat);
  return out;
}

Matrix Lift(const Matrix& M, int block) {
  if (block < 1) throw DimensionError("Lift(): block size must be >= 1");
  return linalg::Kron(M, Matrix::Identity(block, block));
}

bool HasSpanningTree(const DirectedGraph& g) {
  const int n = g.n_vertices();
  if (n == 0) return false;
  const Matrix& a = g.adjacency();
  // Information flows j -> i when a(i, j) > 0.
  for (int root = 0; root < n; ++root) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{root};
    seen[root] = true;
    int count = 1;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int i = 0; i < n; ++i) {
        if (!seen[i] && a(i, j) > 0.0) {
          seen[i] = true;
          ++count;
          stack.push_back(i);
        }
      }
    }
    if (count == n) return true;
  }
  return false;
}

}  // namespace topology
}  // namespace fomas
