#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fomas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an operation receives matrices of incompatible shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical kernel fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace linalg {

/// Tolerances shared by every module.
namespace tol {
inline constexpr double kSymmetry = 1e-9;
inline constexpr double kPinvRelative = 1e-12;
inline constexpr double kConjugatePair = 1e-9;
}  // namespace tol

/// Eigenvalues of a real square matrix.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  int source_dim = 0;

  /// True when every non-real eigenvalue has its conjugate in the list.
  bool IsConjugateClosed(double tolerance = tol::kConjugatePair) const;
};

Matrix Kron(const Matrix& a, const Matrix& b);

/// Entrywise product of two matrices of the same shape.
Matrix Hadamard(const Matrix& a, const Matrix& b);

/// Block-wise scaling: block (i,j) of `blocks` (each block_rows x block_cols)
/// is multiplied by pattern(i,j). Lowers to the entrywise product with
/// pattern ⊗ J_{block_rows x block_cols}.
Matrix HadamardBlocks(const Matrix& pattern, const Matrix& blocks);

/// a + aᵀ. Exactly symmetric.
Matrix Sym(const Matrix& a);

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// σ_max * kPinvRelative are treated as zero.
Matrix Pinv(const Matrix& a);

/// Numerical rank with the same cutoff as Pinv.
int Rank(const Matrix& a);

Spectrum Eig(const Matrix& a);

/// Smallest eigenvalue of a symmetric matrix. Throws DimensionError when
/// the input is not square or not symmetric within kSymmetry (relative to
/// the largest entry, floored at 1).
double SymEigMin(const Matrix& a);
double SymEigMax(const Matrix& a);

/// Largest singular value.
double SpectralNorm(const Matrix& a);

/// Block-diagonal stacking; zero-size blocks are allowed and contribute no
/// rows or columns.
Matrix BlockDiag(const std::vector<Matrix>& blocks);

bool AllFinite(const Matrix& a);
void RequireFinite(const Matrix& a, const std::string& what);
void RequireSquare(const Matrix& a, const std::string& what);

/// Throws DimensionError if `a` is not symmetric within kSymmetry.
void RequireSymmetric(const Matrix& a, const std::string& what);

/// Column vector of ones.
Vector Ones(int n);

/// Builds a dense matrix from nested rows; all rows must have equal length.
Matrix FromRows(const std::vector<std::vector<double>>& rows);

}  // namespace linalg
}  // namespace fomas
