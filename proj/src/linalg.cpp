#include "fomas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fomas {
namespace linalg {

namespace {

std::string Shape(const Matrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

}  // namespace

bool Spectrum::IsConjugateClosed(double tolerance) const {
  std::vector<bool> used(eigenvalues.size(), false);
  for (size_t i = 0; i < eigenvalues.size(); ++i) {
    const auto& lam = eigenvalues[i];
    const double scale = std::max(1.0, std::abs(lam));
    if (std::abs(lam.imag()) <= tolerance * scale) continue;
    if (used[i]) continue;
    bool found = false;
    for (size_t j = 0; j < eigenvalues.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(eigenvalues[j] - std::conj(lam)) <= tolerance * scale) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Matrix Kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix Hadamard(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("Hadamard(): shape mismatch " + Shape(a) + " vs " +
                         Shape(b));
  }
  return a.cwiseProduct(b);
}

Matrix HadamardBlocks(const Matrix& pattern, const Matrix& blocks) {
  if (pattern.rows() == 0 || pattern.cols() == 0 ||
      blocks.rows() % pattern.rows() != 0 ||
      blocks.cols() % pattern.cols() != 0) {
    throw DimensionError("HadamardBlocks(): block grid " + Shape(blocks) +
                         " does not tile pattern " + Shape(pattern));
  }
  const Eigen::Index br = blocks.rows() / pattern.rows();
  const Eigen::Index bc = blocks.cols() / pattern.cols();
  return Hadamard(Kron(pattern, Matrix::Ones(br, bc)), blocks);
}

Matrix Sym(const Matrix& a) {
  RequireSquare(a, "Sym()");
  Matrix out = a + a.transpose();
  // Floating-point addition is commutative, so out is already exactly
  // symmetric; copy the upper triangle anyway to make that explicit.
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < out.cols(); ++j) out(j, i) = out(i, j);
  }
  return out;
}

Matrix Pinv(const Matrix& a) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = (s.size() > 0 ? s(0) : 0.0) * tol::kPinvRelative;
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) {
      out += svd.matrixV().col(k) * (1.0 / s(k)) *
             svd.matrixU().col(k).transpose();
    }
  }
  return out;
}

int Rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double cutoff = s(0) * tol::kPinvRelative;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) ++r;
  }
  return r;
}

Spectrum Eig(const Matrix& a) {
  RequireSquare(a, "Eig()");
  RequireFinite(a, "Eig()");
  Spectrum out;
  out.source_dim = static_cast<int>(a.rows());
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Eig(): Schur iteration did not converge");
  }
  out.eigenvalues.reserve(a.rows());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
  }
  return out;
}

namespace {

Eigen::VectorXd SymmetricEigenvalues(const Matrix& a, const char* who) {
  RequireSymmetric(a, who);
  RequireFinite(a, who);
  if (a.rows() == 0) {
    throw DimensionError(std::string(who) + ": empty matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError(std::string(who) + ": QL iteration did not converge");
  }
  return es.eigenvalues();
}

}  // namespace

double SymEigMin(const Matrix& a) {
  return SymmetricEigenvalues(a, "SymEigMin()").minCoeff();
}

double SymEigMax(const Matrix& a) {
  return SymmetricEigenvalues(a, "SymEigMax()").maxCoeff();
}

double SpectralNorm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Matrix BlockDiag(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

bool AllFinite(const Matrix& a) { return a.allFinite(); }

void RequireFinite(const Matrix& a, const std::string& what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(what + ": non-finite entry");
  }
}

void RequireSquare(const Matrix& a, const std::string& what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(what + ": expected a square matrix, got " + Shape(a));
  }
}

void RequireSymmetric(const Matrix& a, const std::string& what) {
  RequireSquare(a, what);
  if (a.size() == 0) return;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetry * scale) {
    throw DimensionError(what + ": matrix is not symmetric");
  }
}

Vector Ones(int n) { return Vector::Ones(n); }

Matrix FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  const size_t cols = rows.front().size();
  Matrix out(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw DimensionError("FromRows(): ragged rows");
    }
    for (size_t j = 0; j < cols; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace linalg
}  // namespace fomas
