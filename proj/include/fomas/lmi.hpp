#pragma once

#include <map>
#include <string>
#include <vector>

#include "fomas/linalg.hpp"

namespace fomas {
namespace lmi {

enum class VarKind { kSymmetric, kSkew, kGeneral, kDiagonal, kScalar };

/// A structured matrix decision variable. Its free scalars occupy
/// [offset, offset + size) of the problem's flat decision vector.
struct Variable {
  std::string name;
  VarKind kind = VarKind::kGeneral;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size = 0;
  bool positive = false;  // adds the side constraint X ≻ 0 (or x > 0)
};

/// Affine matrix expression F0 + Σ_k x_k F_k over the flat decision vector.
/// Only nonzero coefficient matrices are stored.
class Expr {
 public:
  Expr() = default;
  Expr(int rows, int cols);
  explicit Expr(const Matrix& constant);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const Matrix& constant() const { return constant_; }
  const std::map<int, Matrix>& coefficients() const { return coeffs_; }
  bool IsConstant() const { return coeffs_.empty(); }

  /// Adds `unit` to the coefficient of scalar k.
  void AddCoefficient(int k, const Matrix& unit);

  Expr Transpose() const;
  Matrix Evaluate(const Vector& x) const;

  Expr& operator+=(const Expr& other);
  Expr& operator-=(const Expr& other);
  Expr& operator*=(double s);

 private:
  Matrix constant_;
  std::map<int, Matrix> coeffs_;
};

Expr operator+(Expr a, const Expr& b);
Expr operator-(Expr a, const Expr& b);
Expr operator-(Expr a);
Expr operator*(double s, Expr a);
Expr operator*(const Matrix& a, const Expr& e);
Expr operator*(const Expr& e, const Matrix& b);

/// e + eᵀ
Expr Sym(const Expr& e);
/// a ⊗ e
Expr Kron(const Matrix& a, const Expr& e);
Expr BlockDiag(const std::vector<Expr>& blocks);
/// Dense block grid; every row of blocks must agree on height and every
/// column on width.
Expr Blocks(const std::vector<std::vector<Expr>>& grid);
/// Symmetric block matrix from its upper triangle (grid[i][j], j ≥ i); the
/// strictly lower entries of `upper` are ignored and filled by transposes.
Expr SymmetricBlocks(const std::vector<std::vector<Expr>>& upper);
/// rows x cols zero expression.
inline Expr Zero(int rows, int cols) { return Expr(rows, cols); }

/// Named constraint F(x) ≺ 0.
struct Lmi {
  std::string name;
  Expr F;
};

class Problem {
 public:
  /// Declares a variable and returns it as an expression. Square kinds
  /// require rows == cols; kScalar ignores the shape arguments.
  Expr AddVariable(const std::string& name, VarKind kind, int rows, int cols,
                   bool positive = false);
  Expr AddScalar(const std::string& name, bool positive = true) {
    return AddVariable(name, VarKind::kScalar, 1, 1, positive);
  }

  /// F ≺ 0. F must be square; symmetry is checked on the coefficients.
  void AddNegative(const std::string& name, const Expr& F);
  /// F ≻ 0.
  void AddPositive(const std::string& name, const Expr& F) {
    AddNegative(name, -F);
  }
  /// E(x) = 0 entrywise.
  void AddEquality(const std::string& name, const Expr& E);

  int num_scalars() const { return num_scalars_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(const std::string& name) const;
  bool HasVariable(const std::string& name) const;

  /// User constraints followed by the positivity side constraints.
  std::vector<Lmi> AllConstraints() const;
  const std::vector<Lmi>& constraints() const { return constraints_; }
  const std::vector<Lmi>& equalities() const { return equalities_; }

  /// Value of the named variable for the flat vector x.
  Matrix Value(const std::string& name, const Vector& x) const;
  /// Flat vector from named variable values. Missing variables read as 0.
  Vector Flatten(const std::map<std::string, Matrix>& values) const;
  /// The expression of an already declared variable.
  Expr Var(const std::string& name) const;

  /// Largest leading dimension over all user constraints.
  int MaxConstraintDim() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Lmi> constraints_;
  std::vector<Lmi> equalities_;
  int num_scalars_ = 0;
};

enum class Status { kStrictlyFeasible, kMarginal, kInfeasible, kSolverFailure };

const char* StatusName(Status s);

struct SolverOptions {
  double margin_tol = 1e-7;
  int max_iterations = 200;  // total Newton steps
  /// Decision vector confined to ‖x‖ ≤ radius; homogeneous LMIs otherwise
  /// make the max-t problem unbounded.
  double radius = 1e4;
  double barrier_growth = 12.0;
  /// Relative duality-gap target ν/w ≤ gap_tol·max(1, |t|).
  double gap_tol = 1e-6;
  /// Return as soon as the margin exceeds this value (disabled when <= 0).
  double early_stop_margin = 0.0;
  /// Return once the margin is certified to stay below margin_tol. Turn off
  /// to keep maximizing the margin of an infeasible problem.
  bool stop_when_infeasible = true;
};

struct FeasibilityResult {
  Status status = Status::kSolverFailure;
  std::map<std::string, Matrix> assignment;
  Vector x;
  double margin = 0.0;       // final t of the max-t reformulation
  double upper_bound = 0.0;  // certified bound on the optimal t
  int iterations = 0;
  std::string message;

  bool feasible() const { return status == Status::kStrictlyFeasible; }
};

/// Maximizes t subject to F_k(x) + tI ⪯ 0 for every constraint, the
/// equalities and ‖x‖ ≤ radius, by a log-barrier path-following method.
FeasibilityResult Solve(const Problem& p, const SolverOptions& opts = {});

/// max over constraints of λ_max(F_k(x)), recomputed from the named
/// assignment (independent of the solver's internal iterate).
double WorstEigenvalue(const Problem& p,
                       const std::map<std::string, Matrix>& assignment);

/// max |E(x)| entry over the equality constraints.
double EqualityResidual(const Problem& p,
                        const std::map<std::string, Matrix>& assignment);

/// The equality-eliminated problem: x = x0 + Z z.
struct ReducedProblem {
  Vector x0;
  Matrix Z;
  /// Per constraint: constant F0 followed by one coefficient per z_i.
  std::vector<std::vector<Matrix>> blocks;
  std::vector<std::string> names;
  double equality_residual = 0.0;
};

ReducedProblem Reduce(const Problem& p);

}  // namespace lmi
}  // namespace fomas
