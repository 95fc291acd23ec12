#include "fomas/certificates.hpp"

#include <cmath>
#include <complex>

namespace fomas {
namespace certificates {

lmi::Problem Lemma1Problem(const Matrix& A, double q) {
  linalg::RequireSquare(A, "Lemma1Problem()");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("Lemma1Problem(): q must lie in (0, 1)");
  const int n = static_cast<int>(A.rows());
  const double th = q * M_PI / 2.0;
  const double s = std::sin(th), c = std::cos(th);
  const Matrix T11 = linalg::FromRows({{s, -c}, {c, s}});
  const Matrix T12 = linalg::FromRows({{c, s}, {-s, c}});
  const Matrix T21 = linalg::FromRows({{s, c}, {-c, s}});
  const Matrix T22 = linalg::FromRows({{-c, s}, {-s, -c}});

  lmi::Problem p;
  const auto X11 = p.AddVariable("X11", lmi::VarKind::kSymmetric, n, n);
  const auto X12 = p.AddVariable("X12", lmi::VarKind::kSkew, n, n);
  const auto X21 = p.AddVariable("X21", lmi::VarKind::kSymmetric, n, n);
  const auto X22 = p.AddVariable("X22", lmi::VarKind::kSkew, n, n);

  const lmi::Expr sum = lmi::Kron(T11, A * X11) + lmi::Kron(T12, A * X12) +
                        lmi::Kron(T21, A * X21) + lmi::Kron(T22, A * X22);
  p.AddNegative("lemma1", lmi::Sym(sum));
  p.AddPositive("X1", lmi::Blocks({{X11, X12}, {-X12, X11}}));
  p.AddPositive("X2", lmi::Blocks({{X21, X22}, {-X22, X21}}));
  return p;
}

lmi::FeasibilityResult CertifyLemma1(const Matrix& A, double q,
                                     const lmi::SolverOptions& opts) {
  return lmi::Solve(Lemma1Problem(A, q), opts);
}

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kStable:
      return "stable";
    case Verdict::kUnstable:
      return "unstable";
    case Verdict::kUndecided:
      return "undecided";
  }
  return "unknown";
}

ArgumentReport CertifyArgument(const Matrix& A, double q, double zero_tol) {
  ArgumentReport out;
  const linalg::Spectrum spec = linalg::Eig(A);
  const double bound = q * M_PI / 2.0;
  if (spec.eigenvalues.empty()) {
    out.verdict = Verdict::kStable;
    out.min_arg = M_PI;
    out.margin = M_PI - bound;
    out.detail = "empty state";
    return out;
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  out.min_arg = M_PI;
  for (const auto& lam : spec.eigenvalues) {
    if (std::abs(lam) <= zero_tol * scale) {
      out.verdict = Verdict::kUndecided;
      out.min_arg = 0.0;
      out.margin = -bound;
      out.detail = "eigenvalue at the origin";
      return out;
    }
    out.min_arg = std::min(out.min_arg, std::abs(std::arg(lam)));
  }
  out.margin = out.min_arg - bound;
  out.verdict = out.margin > 0.0 ? Verdict::kStable : Verdict::kUnstable;
  return out;
}

Theorem1Check CheckTheorem1(const Matrix& P, const plant::ControllerRealization& ctrl,
                            const plant::MultiAgentSystem& sys,
                            const synthesis::Scalars& scalars, synthesis::PiMode mode) {
  const synthesis::ReducedData d = synthesis::MakeReducedData(sys, ctrl.n_c);
  const int Dr = d.dim_r(), Dc = d.N * d.n_c, D = d.dim();
  if (P.rows() != D || P.cols() != D) throw DimensionError("CheckTheorem1(): P has the wrong size");
  if (!sys.uncertainty) throw std::invalid_argument("CheckTheorem1(): no uncertainty model");
  const auto& u = *sys.uncertainty;

  plant::ClosedLoopOptions nominal;
  nominal.use_worst_case_delta = false;
  const plant::ClosedLoop cl = plant::BuildClosedLoop(sys, ctrl, d.bundle, nominal);
  const plant::StackedController f = plant::Stack(ctrl, d.n, d.m, d.p);

  const double nDc = linalg::SpectralNorm(f.E_Dc * d.C_r);
  const double nBc = linalg::SpectralNorm(f.E_Bc * d.C_r);
  const double nCc = linalg::SpectralNorm(f.E_Cc);
  const double nAc = linalg::SpectralNorm(f.E_Ac);
  const auto& tau = scalars.tau;
  const bool nonlinear = sys.nonlinearity.has_value();
  double pi_u, pi_l;
  if (mode == synthesis::PiMode::kWeighted) {
    pi_u = tau[0] * nDc * nDc + tau[3] * nBc * nBc + (nonlinear ? tau[2] * scalars.xi : 0.0);
    pi_l = tau[1] * nCc * nCc + tau[4] * nAc * nAc + (nonlinear ? tau[2] * scalars.xi : 0.0);
  } else {
    pi_u = nDc + nBc + scalars.xi;
    pi_l = nCc + nAc + scalars.xi;
  }
  Matrix head = P * cl.A_psi + cl.A_psi.transpose() * P;
  head.topLeftCorner(Dr, Dr).diagonal().array() += pi_u;
  head.bottomRightCorner(Dc, Dc).diagonal().array() += pi_l;

  std::vector<Matrix> cols;
  std::vector<double> weights;
  const auto add = [&](const Matrix& top, const Matrix& bottom, double t) {
    if (top.cols() == 0) return;
    Matrix c = Matrix::Zero(D, top.cols());
    c.topRows(Dr) = top;
    c.bottomRows(Dc) = bottom;
    cols.push_back(P * c);
    weights.push_back(t);
  };
  add(d.LnB * f.D_Dc, Matrix::Zero(Dc, f.D_Dc.cols()), tau[0]);
  add(d.LnB * f.D_Cc, Matrix::Zero(Dc, f.D_Cc.cols()), tau[1]);
  if (nonlinear) add(Matrix::Identity(Dr, Dr), Matrix::Zero(Dc, Dr), tau[2]);
  add(Matrix::Zero(Dr, f.D_Bc.cols()), f.D_Bc, tau[3]);
  add(Matrix::Zero(Dr, f.D_Ac.cols()), f.D_Ac, tau[4]);

  const Matrix I_red = Matrix::Identity(d.N - 1, d.N - 1);
  const int k = (d.N - 1) * u.m0();
  Matrix R_bar = Matrix::Zero(D, k), N_bar_t = Matrix::Zero(D, k);
  R_bar.topRows(Dr) = linalg::Kron(I_red, u.R);
  N_bar_t.topRows(Dr) = linalg::Kron(I_red, u.N).transpose();
  if (mode == synthesis::PiMode::kWeighted) {
    cols.push_back(P * R_bar);
    cols.push_back(N_bar_t);
  } else {
    cols.push_back(R_bar);
    cols.push_back(P * N_bar_t);
  }

  int total = D;
  for (const auto& c : cols) total += static_cast<int>(c.cols());
  Matrix M = Matrix::Zero(total, total);
  M.topLeftCorner(D, D) = head;
  int off = D;
  for (size_t i = 0; i < cols.size(); ++i) {
    const int w = static_cast<int>(cols[i].cols());
    M.block(0, off, D, w) = cols[i];
    M.block(off, 0, w, D) = cols[i].transpose();
    if (i < weights.size()) M.block(off, off, w, w).diagonal().array() = -weights[i];
    off += w;
  }
  // -[[μI, -μI], [-μI, W + μI]] on the last two block rows.
  const int t0 = total - 2 * k;
  const Matrix W = linalg::Kron(I_red, u.W());
  const Matrix Ik = Matrix::Identity(k, k);
  M.block(t0, t0, k, k) = -scalars.mu * Ik;
  M.block(t0, t0 + k, k, k) = scalars.mu * Ik;
  M.block(t0 + k, t0, k, k) = scalars.mu * Ik;
  M.block(t0 + k, t0 + k, k, k) = -W - scalars.mu * Ik;

  Theorem1Check out;
  out.max_eigenvalue = linalg::SymEigMax(0.5 * (M + M.transpose()));
  out.holds = out.max_eigenvalue < 0.0;
  return out;
}

}  // namespace certificates
}  // namespace fomas
