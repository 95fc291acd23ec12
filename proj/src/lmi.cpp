#include "fomas/lmi.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fomas {
namespace lmi {

namespace {

void RequireSameShape(const Expr& a, const Expr& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(who) + ": shape mismatch " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace

Expr::Expr(int rows, int cols) : constant_(Matrix::Zero(rows, cols)) {}

Expr::Expr(const Matrix& constant) : constant_(constant) {}

void Expr::AddCoefficient(int k, const Matrix& unit) {
  auto it = coeffs_.find(k);
  if (it == coeffs_.end()) {
    coeffs_.emplace(k, unit);
  } else {
    it->second += unit;
  }
}

Expr Expr::Transpose() const {
  Expr out(constant_.transpose());
  for (const auto& [k, c] : coeffs_) out.coeffs_.emplace(k, c.transpose());
  return out;
}

Matrix Expr::Evaluate(const Vector& x) const {
  Matrix out = constant_;
  for (const auto& [k, c] : coeffs_) {
    if (k >= x.size()) throw DimensionError("Expr::Evaluate(): vector too short");
    out += x(k) * c;
  }
  return out;
}

Expr& Expr::operator+=(const Expr& other) {
  RequireSameShape(*this, other, "Expr +");
  constant_ += other.constant_;
  for (const auto& [k, c] : other.coeffs_) AddCoefficient(k, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& other) {
  RequireSameShape(*this, other, "Expr -");
  constant_ -= other.constant_;
  for (const auto& [k, c] : other.coeffs_) AddCoefficient(k, -c);
  return *this;
}

Expr& Expr::operator*=(double s) {
  constant_ *= s;
  for (auto& [k, c] : coeffs_) c *= s;
  return *this;
}

Expr operator+(Expr a, const Expr& b) { return a += b; }
Expr operator-(Expr a, const Expr& b) { return a -= b; }
Expr operator-(Expr a) { return a *= -1.0; }
Expr operator*(double s, Expr a) { return a *= s; }

Expr operator*(const Matrix& a, const Expr& e) {
  if (a.cols() != e.rows()) throw DimensionError("Matrix * Expr: inner dimension mismatch");
  Expr out(a * e.constant());
  for (const auto& [k, c] : e.coefficients()) out.AddCoefficient(k, a * c);
  return out;
}

Expr operator*(const Expr& e, const Matrix& b) {
  if (e.cols() != b.rows()) throw DimensionError("Expr * Matrix: inner dimension mismatch");
  Expr out(e.constant() * b);
  for (const auto& [k, c] : e.coefficients()) out.AddCoefficient(k, c * b);
  return out;
}

Expr Sym(const Expr& e) {
  if (e.rows() != e.cols()) throw DimensionError("Sym(Expr): not square");
  return e + e.Transpose();
}

Expr Kron(const Matrix& a, const Expr& e) {
  Expr out(linalg::Kron(a, e.constant()));
  for (const auto& [k, c] : e.coefficients()) out.AddCoefficient(k, linalg::Kron(a, c));
  return out;
}

Expr BlockDiag(const std::vector<Expr>& blocks) {
  std::vector<std::vector<Expr>> grid(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    for (size_t j = 0; j < blocks.size(); ++j) {
      grid[i].push_back(i == j ? blocks[i] : Zero(blocks[i].rows(), blocks[j].cols()));
    }
  }
  return Blocks(grid);
}

Expr Blocks(const std::vector<std::vector<Expr>>& grid) {
  if (grid.empty()) return Expr(0, 0);
  const size_t nc = grid.front().size();
  std::vector<int> heights(grid.size()), widths(nc);
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != nc) throw DimensionError("Blocks(): ragged grid");
    heights[i] = grid[i].front().rows();
  }
  for (size_t j = 0; j < nc; ++j) widths[j] = grid.front()[j].cols();
  for (size_t i = 0; i < grid.size(); ++i) {
    for (size_t j = 0; j < nc; ++j) {
      if (grid[i][j].rows() != heights[i] || grid[i][j].cols() != widths[j]) {
        throw DimensionError("Blocks(): block (" + std::to_string(i) + "," +
                             std::to_string(j) + ") has inconsistent shape");
      }
    }
  }
  int rows = 0, cols = 0;
  for (int h : heights) rows += h;
  for (int w : widths) cols += w;

  Matrix constant = Matrix::Zero(rows, cols);
  std::map<int, Matrix> coeffs;
  int r = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    int c = 0;
    for (size_t j = 0; j < nc; ++j) {
      const Expr& b = grid[i][j];
      constant.block(r, c, b.rows(), b.cols()) = b.constant();
      for (const auto& [k, m] : b.coefficients()) {
        auto it = coeffs.find(k);
        if (it == coeffs.end()) it = coeffs.emplace(k, Matrix::Zero(rows, cols)).first;
        it->second.block(r, c, m.rows(), m.cols()) = m;
      }
      c += widths[j];
    }
    r += heights[i];
  }
  Expr out(constant);
  for (auto& [k, m] : coeffs) out.AddCoefficient(k, m);
  return out;
}

Expr SymmetricBlocks(const std::vector<std::vector<Expr>>& upper) {
  std::vector<std::vector<Expr>> grid = upper;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != grid.size()) throw DimensionError("SymmetricBlocks(): grid not square");
    for (size_t j = 0; j < i; ++j) grid[i][j] = upper[j][i].Transpose();
  }
  return Blocks(grid);
}

Expr Problem::AddVariable(const std::string& name, VarKind kind, int rows,
                          int cols, bool positive) {
  if (HasVariable(name)) throw std::invalid_argument("duplicate variable '" + name + "'");
  if (kind == VarKind::kScalar) rows = cols = 1;
  if (rows < 0 || cols < 0) throw DimensionError("negative variable shape");
  const bool square = kind == VarKind::kSymmetric || kind == VarKind::kSkew ||
                      kind == VarKind::kDiagonal;
  if (square && rows != cols) throw DimensionError("variable '" + name + "' must be square");
  if (positive && !(kind == VarKind::kSymmetric || kind == VarKind::kDiagonal ||
                    kind == VarKind::kScalar)) {
    throw std::invalid_argument("positivity requires a symmetric variable");
  }
  Variable v;
  v.name = name;
  v.kind = kind;
  v.rows = rows;
  v.cols = cols;
  v.offset = num_scalars_;
  v.positive = positive;
  switch (kind) {
    case VarKind::kSymmetric:
      v.size = rows * (rows + 1) / 2;
      break;
    case VarKind::kSkew:
      v.size = rows * (rows - 1) / 2;
      break;
    case VarKind::kGeneral:
      v.size = rows * cols;
      break;
    case VarKind::kDiagonal:
      v.size = rows;
      break;
    case VarKind::kScalar:
      v.size = 1;
      break;
  }
  num_scalars_ += v.size;
  variables_.push_back(v);
  return Var(name);
}

const Variable& Problem::variable(const std::string& name) const {
  for (const auto& v : variables_) {
    if (v.name == name) return v;
  }
  throw std::out_of_range("unknown variable '" + name + "'");
}

bool Problem::HasVariable(const std::string& name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

Expr Problem::Var(const std::string& name) const {
  const Variable& v = variable(name);
  Expr e(v.rows, v.cols);
  int k = v.offset;
  switch (v.kind) {
    case VarKind::kSymmetric:
      for (int j = 0; j < v.cols; ++j) {
        for (int i = 0; i <= j; ++i) {
          Matrix u = Matrix::Zero(v.rows, v.cols);
          u(i, j) = 1.0;
          u(j, i) = 1.0;
          e.AddCoefficient(k++, u);
        }
      }
      break;
    case VarKind::kSkew:
      for (int j = 0; j < v.cols; ++j) {
        for (int i = 0; i < j; ++i) {
          Matrix u = Matrix::Zero(v.rows, v.cols);
          u(i, j) = 1.0;
          u(j, i) = -1.0;
          e.AddCoefficient(k++, u);
        }
      }
      break;
    case VarKind::kGeneral:
      for (int j = 0; j < v.cols; ++j) {
        for (int i = 0; i < v.rows; ++i) {
          Matrix u = Matrix::Zero(v.rows, v.cols);
          u(i, j) = 1.0;
          e.AddCoefficient(k++, u);
        }
      }
      break;
    case VarKind::kDiagonal:
      for (int i = 0; i < v.rows; ++i) {
        Matrix u = Matrix::Zero(v.rows, v.cols);
        u(i, i) = 1.0;
        e.AddCoefficient(k++, u);
      }
      break;
    case VarKind::kScalar:
      e.AddCoefficient(k, Matrix::Ones(1, 1));
      break;
  }
  return e;
}

void Problem::AddNegative(const std::string& name, const Expr& F) {
  if (F.rows() != F.cols()) throw DimensionError("constraint '" + name + "' is not square");
  const auto asym = [](const Matrix& m) {
    return m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
  };
  const auto scale = [](const Matrix& m) {
    return m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
  };
  bool symmetric = asym(F.constant()) <= linalg::tol::kSymmetry * scale(F.constant());
  for (const auto& [k, c] : F.coefficients()) {
    symmetric = symmetric && asym(c) <= linalg::tol::kSymmetry * scale(c);
  }
  if (!symmetric) throw DimensionError("constraint '" + name + "' is not symmetric");
  if (F.rows() == 0) return;
  constraints_.push_back({name, F});
}

void Problem::AddEquality(const std::string& name, const Expr& E) {
  if (E.rows() * E.cols() == 0) return;
  equalities_.push_back({name, E});
}

std::vector<Lmi> Problem::AllConstraints() const {
  std::vector<Lmi> out = constraints_;
  for (const auto& v : variables_) {
    if (v.positive && v.rows > 0) out.push_back({v.name + " > 0", -Var(v.name)});
  }
  return out;
}

Matrix Problem::Value(const std::string& name, const Vector& x) const {
  return Var(name).Evaluate(x);
}

Vector Problem::Flatten(const std::map<std::string, Matrix>& values) const {
  Vector x = Vector::Zero(num_scalars_);
  for (const auto& v : variables_) {
    auto it = values.find(v.name);
    if (it == values.end()) continue;
    const Matrix& m = it->second;
    if (m.rows() != v.rows || m.cols() != v.cols) {
      throw DimensionError("Flatten(): wrong shape for '" + v.name + "'");
    }
    int k = v.offset;
    switch (v.kind) {
      case VarKind::kSymmetric:
        for (int j = 0; j < v.cols; ++j)
          for (int i = 0; i <= j; ++i) x(k++) = 0.5 * (m(i, j) + m(j, i));
        break;
      case VarKind::kSkew:
        for (int j = 0; j < v.cols; ++j)
          for (int i = 0; i < j; ++i) x(k++) = 0.5 * (m(i, j) - m(j, i));
        break;
      case VarKind::kGeneral:
        for (int j = 0; j < v.cols; ++j)
          for (int i = 0; i < v.rows; ++i) x(k++) = m(i, j);
        break;
      case VarKind::kDiagonal:
        for (int i = 0; i < v.rows; ++i) x(k++) = m(i, i);
        break;
      case VarKind::kScalar:
        x(k) = m(0, 0);
        break;
    }
  }
  return x;
}

int Problem::MaxConstraintDim() const {
  int out = 0;
  for (const auto& c : constraints_) out = std::max(out, c.F.rows());
  return out;
}

const char* StatusName(Status s) {
  switch (s) {
    case Status::kStrictlyFeasible:
      return "strictly-feasible";
    case Status::kMarginal:
      return "marginal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kSolverFailure:
      return "solver-failure";
  }
  return "unknown";
}

double WorstEigenvalue(const Problem& p,
                       const std::map<std::string, Matrix>& assignment) {
  const Vector x = p.Flatten(assignment);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : p.AllConstraints()) {
    const Matrix F = c.F.Evaluate(x);
    worst = std::max(worst, linalg::SymEigMax(0.5 * (F + F.transpose())));
  }
  return worst;
}

double EqualityResidual(const Problem& p,
                        const std::map<std::string, Matrix>& assignment) {
  const Vector x = p.Flatten(assignment);
  double worst = 0.0;
  for (const auto& e : p.equalities()) {
    const Matrix v = e.F.Evaluate(x);
    if (v.size() > 0) worst = std::max(worst, v.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace lmi
}  // namespace fomas
