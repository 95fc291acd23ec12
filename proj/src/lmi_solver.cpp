#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Sparse>

#include "fomas/lmi.hpp"

namespace fomas {
namespace lmi {

ReducedProblem Reduce(const Problem& p) {
  const int n = p.num_scalars();
  ReducedProblem out;

  int rows = 0;
  for (const auto& e : p.equalities()) rows += e.F.rows() * e.F.cols();
  if (rows == 0) {
    out.x0 = Vector::Zero(n);
    out.Z = Matrix::Identity(n, n);
  } else {
    Matrix A = Matrix::Zero(rows, n);
    Vector b(rows);
    int r = 0;
    for (const auto& e : p.equalities()) {
      for (int j = 0; j < e.F.cols(); ++j) {
        for (int i = 0; i < e.F.rows(); ++i, ++r) {
          b(r) = -e.F.constant()(i, j);
          for (const auto& [k, c] : e.F.coefficients()) A(r, k) = c(i, j);
        }
      }
    }
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV | Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cutoff = (s.size() > 0 ? s(0) : 0.0) * 1e-10;
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s(k) > cutoff && s(k) > 0.0) ++rank;
    }
    out.x0 = Vector::Zero(n);
    for (int k = 0; k < rank; ++k) {
      out.x0 += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(b) / s(k));
    }
    out.Z = svd.matrixV().rightCols(n - rank);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    out.equality_residual = (A * out.x0 - b).cwiseAbs().maxCoeff() / scale;
  }

  const int nz = static_cast<int>(out.Z.cols());
  for (const auto& c : p.AllConstraints()) {
    const int d = c.F.rows();
    std::vector<Matrix> blocks(nz + 1, Matrix::Zero(d, d));
    blocks[0] = c.F.constant();
    for (const auto& [k, m] : c.F.coefficients()) {
      blocks[0] += out.x0(k) * m;
      for (int i = 0; i < nz; ++i) {
        const double z = out.Z(k, i);
        if (z != 0.0) blocks[i + 1] += z * m;
      }
    }
    for (auto& m : blocks) m = 0.5 * (m + m.transpose());
    out.blocks.push_back(std::move(blocks));
    out.names.push_back(c.name);
  }
  return out;
}

namespace {

class BarrierSolver {
 public:
  BarrierSolver(const ReducedProblem& rp, const SolverOptions& opts)
      : rp_(rp), opts_(opts), nz_(static_cast<int>(rp.Z.cols())), ZtZ_(rp.Z.transpose() * rp.Z) {
    nu_ = 1.0;
    for (const auto& b : rp_.blocks) {
      const Eigen::Index d = b[0].rows();
      nu_ += static_cast<double>(d);
      // Coefficients of -∂G/∂y_i; the last entry is the identity for t.
      std::vector<int> used;
      std::vector<Sparse> coeff;
      for (int i = 0; i < nz_; ++i) {
        if (b[i + 1].isZero(0.0)) continue;
        used.push_back(i);
        coeff.push_back(b[i + 1].sparseView(0.0, 1.0));
      }
      used.push_back(nz_);
      Sparse eye(d, d);
      eye.setIdentity();
      coeff.push_back(eye);
      active_.push_back(std::move(used));
      coeff_.push_back(std::move(coeff));
    }
  }

  double nu() const { return nu_; }

  Vector X(const Vector& y) const { return rp_.x0 + rp_.Z * y.head(nz_); }

  Matrix Slack(size_t j, const Vector& y) const {
    Matrix G = -rp_.blocks[j][0];
    const auto& used = active_[j];
    for (size_t c = 0; c < used.size(); ++c) {
      const double v = y(used[c]);
      if (v != 0.0) G -= v * coeff_[j][c];
    }
    return G;
  }

  // Barrier value; +inf outside the domain.
  double Value(const Vector& y, double w) const {
    const double h = opts_.radius * opts_.radius - X(y).squaredNorm();
    if (!(h > 0.0)) return std::numeric_limits<double>::infinity();
    double phi = -w * y(nz_) - std::log(h);
    for (size_t j = 0; j < rp_.blocks.size(); ++j) {
      Eigen::LLT<Matrix> llt(Slack(j, y));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const auto& L = llt.matrixLLT();
      for (Eigen::Index k = 0; k < L.rows(); ++k) {
        if (!(L(k, k) > 0.0)) return std::numeric_limits<double>::infinity();
        phi -= 2.0 * std::log(L(k, k));
      }
    }
    return std::isfinite(phi) ? phi : std::numeric_limits<double>::infinity();
  }

  // Gradient and Hessian of the barrier at a strictly interior y:
  // g_i = tr(G⁻¹F_i), H_ik = tr(G⁻¹F_i G⁻¹F_k).
  bool Derivatives(const Vector& y, double w, Vector* g, Matrix* H) const {
    const int ny = nz_ + 1;
    *g = Vector::Zero(ny);
    *H = Matrix::Zero(ny, ny);
    (*g)(nz_) = -w;
    for (size_t j = 0; j < rp_.blocks.size(); ++j) {
      const Eigen::Index d = rp_.blocks[j][0].rows();
      Eigen::LLT<Matrix> llt(Slack(j, y));
      if (llt.info() != Eigen::Success) return false;
      const Matrix Ginv = llt.solve(Matrix::Identity(d, d));
      const auto& used = active_[j];
      const auto& F = coeff_[j];
      std::vector<Matrix> P(used.size());
      for (size_t c = 0; c < used.size(); ++c) {
        P[c].noalias() = Ginv * (F[c] * Ginv);
        (*g)(used[c]) += Dot(Ginv, F[c]);
      }
      for (size_t c = 0; c < used.size(); ++c) {
        for (size_t k = 0; k <= c; ++k) {
          const double h = Dot(P[c], F[k]);
          (*H)(used[c], used[k]) += h;
          if (k != c) (*H)(used[k], used[c]) += h;
        }
      }
    }
    const Vector x = X(y);
    const double h = opts_.radius * opts_.radius - x.squaredNorm();
    if (!(h > 0.0)) return false;
    const Vector zx = rp_.Z.transpose() * x;
    g->head(nz_) += 2.0 * zx / h;
    H->topLeftCorner(nz_, nz_) += 2.0 * ZtZ_ / h + 4.0 * zx * zx.transpose() / (h * h);
    return g->allFinite() && H->allFinite();
  }

 private:
  using Sparse = Eigen::SparseMatrix<double>;

  // ⟨A, F⟩ over the nonzeros of F.
  static double Dot(const Matrix& A, const Sparse& F) {
    double sum = 0.0;
    for (Eigen::Index o = 0; o < F.outerSize(); ++o) {
      for (Sparse::InnerIterator it(F, o); it; ++it) sum += A(it.row(), it.col()) * it.value();
    }
    return sum;
  }

  const ReducedProblem& rp_;
  const SolverOptions& opts_;
  int nz_;
  Matrix ZtZ_;
  double nu_;
  std::vector<std::vector<int>> active_;  // scalars with a nonzero block coefficient, then t
  std::vector<std::vector<Sparse>> coeff_;
};

}  // namespace

FeasibilityResult Solve(const Problem& p, const SolverOptions& opts) {
  FeasibilityResult result;
  const ReducedProblem rp = Reduce(p);
  const auto finish = [&](const Vector& x) {
    result.x = x;
    for (const auto& v : p.variables()) result.assignment[v.name] = p.Value(v.name, x);
  };

  if (rp.equality_residual > 1e-9) {
    result.status = Status::kInfeasible;
    result.margin = -std::numeric_limits<double>::infinity();
    result.message = "equality constraints are inconsistent";
    finish(rp.x0);
    return result;
  }
  if (rp.x0.norm() >= opts.radius) {
    result.status = Status::kSolverFailure;
    result.message = "equality solution lies outside the search radius";
    finish(rp.x0);
    return result;
  }
  const int nz = static_cast<int>(rp.Z.cols());
  BarrierSolver solver(rp, opts);

  Vector y = Vector::Zero(nz + 1);
  if (rp.blocks.empty()) {
    result.status = Status::kStrictlyFeasible;
    result.margin = std::numeric_limits<double>::infinity();
    result.message = "no matrix inequalities";
    finish(rp.x0);
    return result;
  }
  double t0 = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < rp.blocks.size(); ++j) {
    t0 = std::min(t0, -linalg::SymEigMax(rp.blocks[j][0]));
  }
  y(nz) = t0 - 1.0;

  double w = 1.0;
  result.upper_bound = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool breakdown = false;
  int iter = 0;
  Vector g;
  Matrix H;
  while (iter < opts.max_iterations && !converged && !breakdown) {
    // Centering for the current weight.
    bool centered = false;
    while (iter < opts.max_iterations) {
      if (!solver.Derivatives(y, w, &g, &H)) {
        breakdown = true;
        break;
      }
      ++iter;
      Eigen::LDLT<Matrix> ldlt(H);
      Vector dy = -ldlt.solve(g);
      if (ldlt.info() != Eigen::Success || !dy.allFinite()) {
        H.diagonal().array() += 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        dy = -H.ldlt().solve(g);
        if (!dy.allFinite()) {
          breakdown = true;
          break;
        }
      }
      const double decrement = -g.dot(dy);
      if (decrement < 0.0) {
        breakdown = true;
        break;
      }
      if (0.5 * decrement <= 1e-7) {
        centered = true;
        break;
      }
      const double phi = solver.Value(y, w);
      double alpha = 1.0;
      bool accepted = false;
      for (int k = 0; k < 60; ++k, alpha *= 0.5) {
        const Vector trial = y + alpha * dy;
        if (solver.Value(trial, w) <= phi - 0.25 * alpha * decrement) {
          y = trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // No further decrease is representable; treat as centered.
        centered = true;
        break;
      }
      if (opts.early_stop_margin > 0.0 && y(nz) > opts.early_stop_margin) break;
    }
    if (breakdown) break;
    const double t = y(nz);
    if (opts.early_stop_margin > 0.0 && t > opts.early_stop_margin) {
      converged = true;
      break;
    }
    if (centered) {
      const double gap = solver.nu() / w;
      result.upper_bound = std::min(result.upper_bound, t + gap);
      if (opts.stop_when_infeasible && result.upper_bound <= opts.margin_tol) {
        converged = true;
        break;
      }
      if ((t > opts.margin_tol || !opts.stop_when_infeasible) &&
          gap <= opts.gap_tol * std::max(1.0, std::abs(t))) {
        converged = true;
        break;
      }
      if (gap <= 1e-3 * opts.margin_tol) {
        converged = true;
        break;
      }
      w *= opts.barrier_growth;
    }
  }

  result.iterations = iter;
  result.margin = y(nz);
  finish(solver.X(y));
  if (result.margin > opts.margin_tol) {
    result.status = Status::kStrictlyFeasible;
  } else if (result.upper_bound <= opts.margin_tol) {
    result.status = Status::kInfeasible;
    result.message = "certified bound on the margin: " + std::to_string(result.upper_bound);
  } else if (converged) {
    result.status = Status::kMarginal;
  } else {
    result.status = Status::kSolverFailure;
    result.message = breakdown ? "Newton breakdown" : "iteration limit reached";
  }
  return result;
}

}  // namespace lmi
}  // namespace fomas
