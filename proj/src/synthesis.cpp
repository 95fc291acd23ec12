#include "fomas/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fomas/certificates.hpp"

namespace fomas {
namespace synthesis {

using lmi::Expr;
using lmi::VarKind;

const char* MethodName(Method m) {
  return m == Method::kTheorem2 ? "theorem2" : "corollary1";
}

Method ParseMethod(const std::string& name) {
  if (name == "theorem2") return Method::kTheorem2;
  if (name == "corollary1") return Method::kCorollary1;
  throw std::invalid_argument("unknown synthesis method '" + name + "'");
}

ReducedData MakeReducedData(const plant::MultiAgentSystem& sys, int n_c) {
  sys.Validate();
  if (n_c < 0) throw DimensionError("controller order must be >= 0");
  ReducedData d;
  const auto& dyn = sys.dynamics;
  d.N = sys.agents();
  d.n = dyn.n();
  d.m = dyn.m();
  d.p = dyn.p();
  d.n_c = n_c;
  d.bundle = topology::Reduce(topology::Laplacian(sys.graph));
  d.Gamma = d.bundle.Gamma();
  const Matrix Ln = topology::Lift(d.bundle.L, d.n);
  const Matrix Lhat_n = topology::Lift(d.bundle.L_hat, d.n);
  const Matrix Lhat_n_pinv = topology::Lift(d.bundle.L_hat_pinv, d.n);
  d.C_r = linalg::Kron(Matrix::Identity(d.N, d.N), dyn.C) * Ln * Lhat_n_pinv;
  d.LnB = Lhat_n * linalg::BlockDiag(dyn.B);
  d.A_red = linalg::Kron(Matrix::Identity(d.N - 1, d.N - 1), dyn.A);
  return d;
}

namespace {

std::string Idx(const std::string& base, int i) { return base + "_" + std::to_string(i + 1); }

Expr ScalarTimes(const Expr& s, const Matrix& m) { return lmi::Kron(m, s); }

Matrix Identity(int k) { return Matrix::Identity(k, k); }

// Stacked fragility factors; zero-width when absent.
plant::StackedController StackFragility(const ReducedData& d, const Options& opts) {
  plant::ControllerRealization probe = plant::ControllerRealization::Zero(d.N, d.n_c, d.m, d.p);
  probe.fragility = opts.fragility;
  if (probe.fragility && probe.fragility->empty()) probe.fragility.reset();
  probe.Validate(d.N, d.m, d.p);
  return plant::Stack(probe, d.n, d.m, d.p);
}

struct Column {
  Expr block;  // dim x r
  int tau;     // index into AssembledProblem::tau
};

// Symmetric block matrix [[head, cols..., tail],[*, -τ_i I, ...],[*, ..., -M]].
Expr Stack(const Expr& head, const std::vector<Column>& cols,
           const std::array<std::optional<Expr>, 5>& tau,
           const std::vector<Expr>& tail_cols, const std::vector<std::vector<Expr>>& tail_diag) {
  std::vector<Expr> all_cols;
  std::vector<Expr> diag;
  for (const auto& c : cols) {
    all_cols.push_back(c.block);
    diag.push_back(ScalarTimes(-*tau[c.tau], Identity(c.block.cols())));
  }
  const size_t k = all_cols.size();
  const size_t total = 1 + k + tail_cols.size();
  std::vector<std::vector<Expr>> grid(total, std::vector<Expr>(total));
  std::vector<int> width(total);
  width[0] = head.rows();
  for (size_t i = 0; i < k; ++i) width[1 + i] = all_cols[i].cols();
  for (size_t i = 0; i < tail_cols.size(); ++i) width[1 + k + i] = tail_cols[i].cols();
  for (size_t i = 0; i < total; ++i) {
    for (size_t j = 0; j < total; ++j) grid[i][j] = lmi::Zero(width[i], width[j]);
  }
  grid[0][0] = head;
  for (size_t i = 0; i < k; ++i) {
    grid[0][1 + i] = all_cols[i];
    grid[1 + i][1 + i] = diag[i];
  }
  for (size_t i = 0; i < tail_cols.size(); ++i) {
    grid[0][1 + k + i] = tail_cols[i];
    for (size_t j = i; j < tail_cols.size(); ++j) grid[1 + k + i][1 + k + j] = tail_diag[i][j];
  }
  return lmi::SymmetricBlocks(grid);
}

// -[[μI, -μI], [-μI, W + μI]] as an upper-triangular 2x2 grid.
std::vector<std::vector<Expr>> UncertaintyTail(const Expr& mu, const Matrix& W) {
  const int k = static_cast<int>(W.rows());
  const Expr muI = ScalarTimes(mu, Identity(k));
  return {{-muI, muI}, {lmi::Zero(k, k), Expr(-W) - muI}};
}

void CheckDim(const ReducedData& d, const Options& opts) {
  if (d.dim() > opts.max_dim) {
    throw DimensionError("closed-loop state dimension " + std::to_string(d.dim()) +
                         " exceeds the limit " + std::to_string(opts.max_dim));
  }
}

}  // namespace

AssembledProblem AssembleTheorem2(const plant::MultiAgentSystem& sys,
                                  const Options& opts, const Anchor* anchor) {
  if (!sys.uncertainty) {
    throw std::invalid_argument("Theorem 2 needs an uncertainty model (W is undefined)");
  }
  AssembledProblem ap;
  ap.method = Method::kTheorem2;
  ap.data = MakeReducedData(sys, opts.n_c);
  const ReducedData& d = ap.data;
  CheckDim(d, opts);
  const auto& u = *sys.uncertainty;
  const int N = d.N, n = d.n, m = d.m, p = d.p, nc = d.n_c;
  const int Dr = d.dim_r(), Dc = N * nc, D = d.dim();
  lmi::Problem& pr = ap.problem;
  ap.restricted = anchor != nullptr;

  const plant::ControllerRealization* fixed =
      anchor && anchor->fixed ? &*anchor->fixed : nullptr;
  if (fixed) fixed->Validate(N, m, p);
  ap.pu = pr.AddVariable("pu", VarKind::kSymmetric, n, n, true);
  for (int i = 0; i < N; ++i) {
    ap.pd.push_back(pr.AddVariable(Idx("pd", i), VarKind::kSymmetric, nc, nc, true));
    if (fixed) {
      ap.a.push_back(ap.pd[i] * fixed->A_c[i]);
      ap.b.push_back(ap.pd[i] * fixed->B_c[i]);
    } else {
      ap.a.push_back(pr.AddVariable(Idx("a", i), VarKind::kGeneral, nc, nc));
      ap.b.push_back(pr.AddVariable(Idx("b", i), VarKind::kGeneral, nc, p));
    }
  }
  for (int i = 0; i < N; ++i) {
    const Matrix& B = sys.dynamics.B[i];
    if (fixed) {
      ap.c.push_back(ap.pu * Matrix(B * fixed->C_c[i]));
      ap.d.push_back(ap.pu * Matrix(B * fixed->D_c[i]));
    } else if (anchor) {
      const Matrix& G = anchor->G.at(i);
      const Expr Y = pr.AddVariable(Idx("Y", i), VarKind::kGeneral, m, m);
      pr.AddEquality(Idx("range", i), ap.pu * B - G * Y);
      ap.c.push_back(G * pr.AddVariable(Idx("ct", i), VarKind::kGeneral, m, nc));
      ap.d.push_back(G * pr.AddVariable(Idx("dt", i), VarKind::kGeneral, m, p));
    } else {
      ap.c.push_back(pr.AddVariable(Idx("c", i), VarKind::kGeneral, n, nc));
      ap.d.push_back(pr.AddVariable(Idx("d", i), VarKind::kGeneral, n, p));
    }
  }

  const Expr Pu = lmi::Kron(Identity(N - 1), ap.pu);
  const Expr Pd = lmi::BlockDiag(ap.pd);
  const Expr P = lmi::BlockDiag({Pu, Pd});

  // 𝔇 block (k, i) = L̂_ki 𝔡_i; ℭ block (k, i) = L̂_ki 𝔠_i.
  std::vector<std::vector<Expr>> dg(N - 1), cg(N - 1);
  for (int k = 0; k < N - 1; ++k) {
    for (int i = 0; i < N; ++i) {
      const double l = d.bundle.L_hat(k, i);
      dg[k].push_back(l * ap.d[i]);
      cg[k].push_back(l * ap.c[i]);
    }
  }
  const Expr Dfrak = lmi::Blocks(dg);
  const Expr Cfrak = lmi::Blocks(cg);
  const Expr Bfrak = lmi::BlockDiag(ap.b);
  const Expr Afrak = lmi::BlockDiag(ap.a);

  const Expr omega11 = lmi::Sym(Pu * d.A_red) + lmi::Sym(Dfrak * d.C_r);
  const Expr omega12 = Cfrak + d.C_r.transpose() * Bfrak.Transpose();
  const Expr omega22 = lmi::Sym(Afrak);

  const plant::StackedController f = StackFragility(d, opts);
  const bool nonlinear = sys.nonlinearity.has_value();
  ap.xi = nonlinear ? sys.nonlinearity->xi1 * sys.nonlinearity->xi1 : 0.0;

  const auto tau_if = [&](int idx, bool needed) {
    if (needed) ap.tau[idx] = pr.AddScalar("tau" + std::to_string(idx + 1));
  };
  tau_if(0, f.D_Dc.cols() > 0);
  tau_if(1, f.D_Cc.cols() > 0);
  tau_if(2, nonlinear);
  tau_if(3, f.D_Bc.cols() > 0);
  tau_if(4, f.D_Ac.cols() > 0);
  ap.mu = pr.AddScalar("mu");

  const double nDc = linalg::SpectralNorm(f.E_Dc * d.C_r);
  const double nBc = linalg::SpectralNorm(f.E_Bc * d.C_r);
  const double nCc = linalg::SpectralNorm(f.E_Cc);
  const double nAc = linalg::SpectralNorm(f.E_Ac);
  Expr pi_u(1, 1), pi_l(1, 1);
  if (opts.pi_mode == PiMode::kWeighted) {
    if (ap.tau[0]) pi_u += (nDc * nDc) * *ap.tau[0];
    if (ap.tau[3]) pi_u += (nBc * nBc) * *ap.tau[3];
    if (ap.tau[1]) pi_l += (nCc * nCc) * *ap.tau[1];
    if (ap.tau[4]) pi_l += (nAc * nAc) * *ap.tau[4];
    if (ap.tau[2]) {
      pi_u += ap.xi * *ap.tau[2];
      pi_l += ap.xi * *ap.tau[2];
    }
  } else {
    pi_u += Expr(Matrix::Constant(1, 1, nDc + nBc + ap.xi));
    pi_l += Expr(Matrix::Constant(1, 1, nCc + nAc + ap.xi));
  }

  const Expr head = lmi::SymmetricBlocks(
      {{omega11 + ScalarTimes(pi_u, Identity(Dr)), omega12},
       {lmi::Zero(Dc, Dr), omega22 + ScalarTimes(pi_l, Identity(Dc))}});

  const auto stacked = [&](const Matrix& top, const Matrix& bottom) {
    Matrix out(D, std::max(top.cols(), bottom.cols()));
    out.setZero();
    out.topRows(Dr) = top;
    out.bottomRows(Dc) = bottom;
    return out;
  };
  std::vector<Column> cols;
  const int r_Dc = static_cast<int>(f.D_Dc.cols()), r_Cc = static_cast<int>(f.D_Cc.cols());
  const int r_Bc = static_cast<int>(f.D_Bc.cols()), r_Ac = static_cast<int>(f.D_Ac.cols());
  if (ap.tau[0]) cols.push_back({P * stacked(d.LnB * f.D_Dc, Matrix::Zero(Dc, r_Dc)), 0});
  if (ap.tau[1]) cols.push_back({P * stacked(d.LnB * f.D_Cc, Matrix::Zero(Dc, r_Cc)), 1});
  if (ap.tau[2]) cols.push_back({P * stacked(Identity(Dr), Matrix::Zero(Dc, Dr)), 2});
  if (ap.tau[3]) cols.push_back({P * stacked(Matrix::Zero(Dr, r_Bc), f.D_Bc), 3});
  if (ap.tau[4]) cols.push_back({P * stacked(Matrix::Zero(Dr, r_Ac), f.D_Ac), 4});

  const Matrix I_red = Identity(N - 1);
  const Matrix R_bar = stacked(linalg::Kron(I_red, u.R), Matrix::Zero(Dc, (N - 1) * u.m0()));
  const Matrix N_bar_t =
      stacked(linalg::Kron(I_red, u.N).transpose(), Matrix::Zero(Dc, (N - 1) * u.m0()));
  const Matrix W_hat = linalg::Kron(I_red, u.W());
  std::vector<Expr> tail;
  if (opts.pi_mode == PiMode::kWeighted) {
    tail = {P * R_bar, Expr(N_bar_t)};
  } else {
    tail = {Expr(R_bar), P * N_bar_t};
  }
  const Expr F = Stack(head, cols, ap.tau, tail, UncertaintyTail(*ap.mu, W_hat));
  ap.leading_dim = D;
  ap.lmi_dim = F.rows();
  pr.AddNegative("theorem2", F);
  return ap;
}

AssembledProblem AssembleCorollary1(const plant::MultiAgentSystem& sys,
                                    const Options& opts, const Anchor* anchor) {
  if (sys.nonlinearity) {
    throw std::invalid_argument("Corollary 1 covers linear systems only; use Theorem 2");
  }
  AssembledProblem ap;
  ap.method = Method::kCorollary1;
  ap.data = MakeReducedData(sys, opts.n_c);
  const ReducedData& d = ap.data;
  CheckDim(d, opts);
  const int N = d.N, n = d.n, m = d.m, p = d.p, nc = d.n_c;
  const int Dr = d.dim_r(), Dc = N * nc, D = d.dim();
  lmi::Problem& pr = ap.problem;
  ap.restricted = anchor != nullptr;
  const Matrix& Ct = sys.dynamics.C;

  const plant::ControllerRealization* fixed =
      anchor && anchor->fixed ? &*anchor->fixed : nullptr;
  if (fixed) fixed->Validate(N, m, p);
  ap.pu = pr.AddVariable("pu", VarKind::kSymmetric, n, n, true);
  for (int i = 0; i < N; ++i) {
    ap.pd.push_back(pr.AddVariable(Idx("pd", i), VarKind::kSymmetric, nc, nc, true));
    if (fixed) {
      ap.a.push_back(fixed->A_c[i] * ap.pd[i]);
      ap.c.push_back(fixed->C_c[i] * ap.pd[i]);
    } else {
      ap.a.push_back(pr.AddVariable(Idx("a", i), VarKind::kGeneral, nc, nc));
      ap.c.push_back(pr.AddVariable(Idx("c", i), VarKind::kGeneral, m, nc));
    }
  }
  if (anchor && !fixed) {
    const Expr Y = pr.AddVariable("Y", VarKind::kGeneral, p, p);
    pr.AddEquality("range", Ct * ap.pu - Y * anchor->H);
  }
  for (int i = 0; i < N; ++i) {
    if (fixed) {
      ap.b.push_back(Matrix(fixed->B_c[i] * Ct) * ap.pu);
      ap.d.push_back(Matrix(fixed->D_c[i] * Ct) * ap.pu);
    } else if (anchor) {
      ap.b.push_back(pr.AddVariable(Idx("bt", i), VarKind::kGeneral, nc, p) * anchor->H);
      ap.d.push_back(pr.AddVariable(Idx("dt", i), VarKind::kGeneral, m, p) * anchor->H);
    } else {
      ap.b.push_back(pr.AddVariable(Idx("b", i), VarKind::kGeneral, nc, n));
      ap.d.push_back(pr.AddVariable(Idx("d", i), VarKind::kGeneral, m, n));
    }
  }

  const Expr Pu = lmi::Kron(Identity(N - 1), ap.pu);
  const Expr Pd = lmi::BlockDiag(ap.pd);
  const Expr P = lmi::BlockDiag({Pu, Pd});

  // 𝔇 block (i, k) = Γ_ik 𝔡_i and 𝔅 block (i, k) = Γ_ik 𝔟_i, the images of
  // D_c C_r P_u and B_c C_r P_u.
  std::vector<std::vector<Expr>> dg(N), bg(N);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N - 1; ++k) {
      dg[i].push_back(d.Gamma(i, k) * ap.d[i]);
      bg[i].push_back(d.Gamma(i, k) * ap.b[i]);
    }
  }
  const Expr Dfrak = lmi::Blocks(dg);
  const Expr Bfrak = lmi::Blocks(bg);
  const Expr Cfrak = lmi::BlockDiag(ap.c);
  const Expr Afrak = lmi::BlockDiag(ap.a);
  const Expr AG = lmi::Blocks({{d.A_red * Pu + d.LnB * Dfrak, d.LnB * Cfrak}, {Bfrak, Afrak}});

  const double s = std::sin(sys.dynamics.q * M_PI / 2.0);
  const Expr head = s * lmi::Sym(AG);
  Expr F = head;
  if (sys.uncertainty) {
    const auto& u = *sys.uncertainty;
    const Matrix I_red = Identity(N - 1);
    const int k = (N - 1) * u.m0();
    Matrix R_bar = Matrix::Zero(D, k);
    R_bar.topRows(Dr) = linalg::Kron(I_red, u.R);
    Matrix N_bar_t = Matrix::Zero(D, k);
    N_bar_t.topRows(Dr) = linalg::Kron(I_red, u.N).transpose();
    ap.mu = pr.AddScalar("mu");
    F = Stack(head, {}, ap.tau, {Expr(Matrix(s * R_bar)), P * N_bar_t},
              UncertaintyTail(*ap.mu, linalg::Kron(I_red, u.W())));
  }
  (void)Dc;
  ap.leading_dim = D;
  ap.lmi_dim = F.rows();
  pr.AddNegative("corollary1", F);
  return ap;
}

namespace {

double RelativeResidual(const Matrix& got, const Matrix& want) {
  if (want.size() == 0) return 0.0;
  return (got - want).norm() / std::max(1.0, want.norm());
}

Matrix SolveRight(const Matrix& X, const Matrix& P) {
  // X P⁻¹ for symmetric positive definite P.
  if (P.size() == 0) return Matrix::Zero(X.rows(), 0);
  return P.llt().solve(X.transpose()).transpose();
}

Matrix SolveLeft(const Matrix& P, const Matrix& X) {
  if (P.size() == 0) return Matrix::Zero(0, X.cols());
  return P.llt().solve(X);
}

}  // namespace

Recovery RecoverTheorem2(const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                         const plant::MultiAgentSystem& sys) {
  const ReducedData& d = ap.data;
  Recovery out;
  auto& c = out.controller;
  c.n_c = d.n_c;
  const Matrix pu = ap.pu.Evaluate(r.x);
  for (int i = 0; i < d.N; ++i) {
    const Matrix pd = ap.pd[i].Evaluate(r.x);
    if (d.n_c > 0 && pd.llt().info() != Eigen::Success) {
      throw NumericalError("recovered P_d is not positive definite");
    }
    c.A_c.push_back(SolveLeft(pd, ap.a[i].Evaluate(r.x)));
    c.B_c.push_back(SolveLeft(pd, ap.b[i].Evaluate(r.x)));
    const Matrix puB = pu * sys.dynamics.B[i];
    const Matrix puB_pinv = linalg::Pinv(puB);
    const Matrix ci = ap.c[i].Evaluate(r.x), di = ap.d[i].Evaluate(r.x);
    c.C_c.push_back(puB_pinv * ci);
    c.D_c.push_back(puB_pinv * di);
    out.residual = std::max({out.residual, RelativeResidual(puB * c.C_c.back(), ci),
                             RelativeResidual(puB * c.D_c.back(), di)});
  }
  return out;
}

Recovery RecoverCorollary1(const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                           const plant::MultiAgentSystem& sys) {
  const ReducedData& d = ap.data;
  const Matrix& Ct = sys.dynamics.C;
  if (linalg::Rank(Ct) != Ct.rows()) {
    throw std::invalid_argument("C lacks full row rank; Corollary 1 recovery is invalid");
  }
  Recovery out;
  auto& c = out.controller;
  c.n_c = d.n_c;
  const Matrix pu = ap.pu.Evaluate(r.x);
  const Matrix Ct_pinv = linalg::Pinv(Ct);
  const Matrix CtPu = Ct * pu;
  for (int i = 0; i < d.N; ++i) {
    const Matrix pd = ap.pd[i].Evaluate(r.x);
    c.A_c.push_back(SolveRight(ap.a[i].Evaluate(r.x), pd));
    c.C_c.push_back(SolveRight(ap.c[i].Evaluate(r.x), pd));
    const Matrix bi = ap.b[i].Evaluate(r.x), di = ap.d[i].Evaluate(r.x);
    c.B_c.push_back(SolveRight(bi, pu) * Ct_pinv);
    c.D_c.push_back(SolveRight(di, pu) * Ct_pinv);
    out.residual = std::max({out.residual, RelativeResidual(c.B_c.back() * CtPu, bi),
                             RelativeResidual(c.D_c.back() * CtPu, di)});
  }
  return out;
}

namespace {

Matrix EvaluateP(const AssembledProblem& ap, const Vector& x) {
  std::vector<Matrix> blocks(ap.data.N - 1, ap.pu.Evaluate(x));
  for (const auto& pd : ap.pd) blocks.push_back(pd.Evaluate(x));
  return linalg::BlockDiag(blocks);
}

Scalars EvaluateScalars(const AssembledProblem& ap, const Vector& x) {
  Scalars s;
  for (int i = 0; i < 5; ++i) {
    if (ap.tau[i]) s.tau[i] = ap.tau[i]->Evaluate(x)(0, 0);
  }
  if (ap.mu) s.mu = ap.mu->Evaluate(x)(0, 0);
  s.xi = ap.xi;
  return s;
}

AssembledProblem Assemble(Method method, const plant::MultiAgentSystem& sys,
                          const Options& opts, const Anchor* anchor) {
  return method == Method::kTheorem2 ? AssembleTheorem2(sys, opts, anchor)
                                     : AssembleCorollary1(sys, opts, anchor);
}

Recovery Recover(const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                 const plant::MultiAgentSystem& sys) {
  return ap.method == Method::kTheorem2 ? RecoverTheorem2(ap, r, sys)
                                        : RecoverCorollary1(ap, r, sys);
}

// True when the recovered controller stabilizes the worst-case closed loop.
bool Stabilizes(const plant::MultiAgentSystem& sys, const plant::ControllerRealization& c,
                const ReducedData& d) {
  const plant::ClosedLoop cl = plant::BuildClosedLoop(sys, c, d.bundle);
  const auto verdict = certificates::CertifyArgument(cl.Total(), sys.dynamics.q);
  return verdict.verdict == certificates::Verdict::kStable;
}

}  // namespace

SynthesisReport Synthesize(const plant::MultiAgentSystem& sys, Method method,
                           const Options& opts, const lmi::SolverOptions& solver) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SynthesisReport rep;
  rep.method = method;
  const auto finish = [&]() {
    rep.solve_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
  };

  const AssembledProblem relaxed = Assemble(method, sys, opts, nullptr);
  rep.leading_dim = relaxed.leading_dim;
  rep.relaxed = lmi::Solve(relaxed.problem, solver);
  rep.iterations = rep.relaxed.iterations;
  rep.status = rep.relaxed.status;
  rep.margin = rep.relaxed.margin;
  if (!rep.relaxed.feasible()) {
    rep.message = std::string("relaxed LMI ") + lmi::StatusName(rep.relaxed.status);
    return finish();
  }

  const auto anchor_from = [&](const AssembledProblem& ap, const Vector& x) {
    Anchor anchor;
    const Matrix pu = ap.pu.Evaluate(x);
    if (method == Method::kTheorem2) {
      for (const auto& B : sys.dynamics.B) anchor.G.push_back(pu * B);
    } else {
      anchor.H = sys.dynamics.C * pu;
    }
    return anchor;
  };
  const auto accept = [&](const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                          const Recovery& rec, const char* stage) {
    rep.stage = stage;
    rep.certified = true;
    rep.status = lmi::Status::kStrictlyFeasible;
    rep.margin = r.margin;
    rep.controller = rec.controller;
    rep.recovery_residual = rec.residual;
    rep.P = EvaluateP(ap, r.x);
    rep.scalars = EvaluateScalars(ap, r.x);
  };

  lmi::SolverOptions keep_going = solver;
  keep_going.stop_when_infeasible = false;

  Anchor anchor = anchor_from(relaxed, rep.relaxed.x);
  std::optional<plant::ControllerRealization> current, best_ctrl;
  double best = -std::numeric_limits<double>::infinity();
  double best_analysis = best;
  for (int round = 0; round <= opts.max_rounds; ++round) {
    rep.rounds = round;
    const AssembledProblem restricted = Assemble(method, sys, opts, &anchor);
    lmi::FeasibilityResult rr = lmi::Solve(restricted.problem, keep_going);
    rep.iterations += rr.iterations;
    if (rr.status == lmi::Status::kSolverFailure && rr.x.size() == 0) break;
    const Recovery rec = Recover(restricted, rr, sys);
    if (!rep.restricted || rr.margin > rep.restricted->margin) rep.restricted = rr;
    if (rr.feasible() && Stabilizes(sys, rec.controller, restricted.data)) {
      accept(restricted, rr, rec, "restricted");
      return finish();
    }
    current = rec.controller;
    Anchor fixed;
    fixed.fixed = current;
    const AssembledProblem analysis = Assemble(method, sys, opts, &fixed);
    const lmi::FeasibilityResult ar = lmi::Solve(analysis.problem, keep_going);
    rep.iterations += ar.iterations;
    if (ar.feasible() && Stabilizes(sys, *current, analysis.data)) {
      accept(analysis, ar, Recovery{*current, 0.0}, "analysis");
      return finish();
    }
    if (ar.margin > best_analysis && Stabilizes(sys, *current, analysis.data)) {
      best_analysis = ar.margin;
      best_ctrl = current;
    }
    const double progress = std::max(rr.margin, ar.margin);
    if (round > 0 && progress <= best + 1e-6 * std::max(1.0, std::abs(best))) break;
    best = std::max(best, progress);
    anchor = anchor_from(analysis, ar.x);
  }

  // Uncertified fallback: the alternation's best stabilizing controller,
  // otherwise the pseudo-inverse recovery of the relaxed solution.
  const Recovery rec = Recover(relaxed, rep.relaxed, sys);
  rep.status = rep.relaxed.status;
  rep.margin = rep.relaxed.margin;
  rep.P = EvaluateP(relaxed, rep.relaxed.x);
  rep.scalars = EvaluateScalars(relaxed, rep.relaxed.x);
  if (best_ctrl) {
    rep.stage = "alternation";
    rep.controller = best_ctrl;
    rep.recovery_residual = 0.0;
  } else {
    rep.stage = "relaxed";
    rep.controller = rec.controller;
    rep.recovery_residual = rec.residual;
  }
  rep.message = "no certified controller (best fixed-controller margin " +
                std::to_string(best_analysis) + "); returning the " + rep.stage + " controller";
  return finish();
}

}  // namespace synthesis
}  // namespace fomas
