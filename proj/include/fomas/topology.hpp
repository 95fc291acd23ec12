#pragma once

#include <stdexcept>

#include "fomas/linalg.hpp"

namespace fomas {
namespace topology {

/// Raised when the graph has no directed spanning tree, so the reduced
/// Laplacian is rank deficient and the consensus transformation is invalid.
class SpanningTreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weighted directed graph. adjacency(i, j) > 0 means agent i receives
/// information from agent j.
class DirectedGraph {
 public:
  explicit DirectedGraph(Matrix adjacency);

  int n_vertices() const { return static_cast<int>(adjacency_.rows()); }
  const Matrix& adjacency() const { return adjacency_; }

 private:
  Matrix adjacency_;
};

/// Laplacian L together with its row-reduced form L̂ and L̂†.
struct LaplacianBundle {
  Matrix L;
  Matrix L_hat;
  int dropped_row = 0;
  Matrix L_hat_pinv;

  /// L·L̂†, the N x (N-1) map from reduced to full disagreement
  /// coordinates. Equals [I; -1ᵀ] for balanced graphs when the last row is
  /// dropped.
  Matrix Gamma() const { return L * L_hat_pinv; }
};

/// l_ii = Σ_p a_ip, l_ij = -a_ij.
Matrix Laplacian(const DirectedGraph& g);

/// Removes `dropped_row` from L. Throws SpanningTreeError when the result
/// lacks full row rank. A negative `dropped_row` selects the last row.
LaplacianBundle Reduce(const Matrix& L, int dropped_row = -1);

/// M ⊗ I_block.
Matrix Lift(const Matrix& M, int block);

/// True iff some vertex reaches every other vertex along information flow.
bool HasSpanningTree(const DirectedGraph& g);

}  // namespace topology
}  // namespace fomas
