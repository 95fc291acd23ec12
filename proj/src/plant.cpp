#include "fomas/plant.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace fomas {
namespace plant {

using linalg::BlockDiag;
using linalg::Kron;

namespace {

std::string Dims(const Matrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

void RequireShape(const Matrix& a, Eigen::Index rows, Eigen::Index cols,
                  const std::string& what) {
  if (a.rows() != rows || a.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << Dims(a);
    throw DimensionError(os.str());
  }
}

}  // namespace

void AgentDynamics::Validate() const {
  linalg::RequireSquare(A, "AgentDynamics.A");
  linalg::RequireFinite(A, "AgentDynamics.A");
  linalg::RequireFinite(C, "AgentDynamics.C");
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("AgentDynamics: fractional order must lie in (0, 1)");
  }
  if (B.empty()) throw DimensionError("AgentDynamics: no agents");
  if (C.cols() != A.rows()) throw DimensionError("AgentDynamics: C has wrong column count");
  for (const auto& b : B) {
    RequireShape(b, A.rows(), B.front().cols(), "AgentDynamics.B_i");
    linalg::RequireFinite(b, "AgentDynamics.B_i");
  }
}

UncertaintyModel UncertaintyModel::FromZ(Matrix R, Matrix N, Matrix J,
                                         std::vector<Matrix> Z) {
  UncertaintyModel u;
  u.R = std::move(R);
  u.N = std::move(N);
  u.J = std::move(J);
  u.Z = std::move(Z);
  for (const auto& z : u.Z) u.delta.push_back(DeltaOf(z, u.J));
  return u;
}

UncertaintyModel UncertaintyModel::FromDelta(Matrix R, Matrix N, Matrix J,
                                             std::vector<Matrix> delta) {
  UncertaintyModel u;
  u.R = std::move(R);
  u.N = std::move(N);
  u.J = std::move(J);
  u.delta = std::move(delta);
  return u;
}

std::optional<NonlinearSpec> MakeNonlinearity(const std::string& name,
                                              double xi1) {
  if (name == "none" || name.empty()) return std::nullopt;
  if (name == "pmsm_sin") {
    NonlinearSpec spec;
    spec.name = name;
    spec.xi1 = xi1;
    spec.phi = [](const Vector& x, const Vector& u, double) {
      Vector out(2);
      out(0) = std::sin(x(1) * u(0)) + 0.5 * std::sin(x(1));
      out(1) = -std::sin(x(0));
      return out;
    };
    return spec;
  }
  throw std::invalid_argument("unknown nonlinearity '" + name + "'");
}

double FragilityAtom::operator()(double t) const {
  switch (kind) {
    case Kind::kZero:
      return 0.0;
    case Kind::kConst:
      return gain;
    case Kind::kSin:
      return gain * std::sin(freq * t + phase);
    case Kind::kCos:
      return gain * std::cos(freq * t + phase);
  }
  return 0.0;
}

Matrix Perturbation::FAt(double t) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(F.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(F.front().size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = F[i][j](t);
  }
  return out;
}

void ControllerRealization::Validate(int agents, int m, int p) const {
  if (n_c < 0) throw DimensionError("controller order must be >= 0");
  const auto check_list = [&](const std::vector<Matrix>& list, int rows,
                              int cols, const char* what) {
    if (static_cast<int>(list.size()) != agents) {
      throw DimensionError(std::string("controller ") + what +
                           ": expected one block per agent");
    }
    for (const auto& b : list) {
      RequireShape(b, rows, cols, std::string("controller ") + what);
      linalg::RequireFinite(b, std::string("controller ") + what);
    }
  };
  check_list(A_c, n_c, n_c, "A_c");
  check_list(B_c, n_c, p, "B_c");
  check_list(C_c, m, n_c, "C_c");
  check_list(D_c, m, p, "D_c");
  if (fragility) {
    const auto check_pert = [&](const std::vector<Perturbation>& list,
                                int rows, int cols, const char* what) {
      if (list.empty()) return;
      if (static_cast<int>(list.size()) != agents) {
        throw DimensionError(std::string("fragility ") + what +
                             ": expected one entry per agent");
      }
      for (const auto& pert : list) {
        const Matrix f = pert.FAt(0.0);
        if (pert.D.rows() != rows || pert.E.cols() != cols ||
            pert.D.cols() != f.rows() || f.cols() != pert.E.rows()) {
          throw DimensionError(std::string("fragility ") + what +
                               ": D F E does not match controller block");
        }
      }
    };
    check_pert(fragility->A, n_c, n_c, "A_c");
    check_pert(fragility->B, n_c, p, "B_c");
    check_pert(fragility->C, m, n_c, "C_c");
    check_pert(fragility->D, m, p, "D_c");
  }
}

ControllerRealization ControllerRealization::Static(std::vector<Matrix> D_c,
                                                    int p) {
  ControllerRealization c;
  c.n_c = 0;
  for (const auto& d : D_c) {
    c.A_c.emplace_back(0, 0);
    c.B_c.emplace_back(0, p);
    c.C_c.emplace_back(d.rows(), 0);
  }
  c.D_c = std::move(D_c);
  return c;
}

ControllerRealization ControllerRealization::Zero(int agents, int n_c, int m,
                                                  int p) {
  ControllerRealization c;
  c.n_c = n_c;
  for (int i = 0; i < agents; ++i) {
    c.A_c.push_back(Matrix::Zero(n_c, n_c));
    c.B_c.push_back(Matrix::Zero(n_c, p));
    c.C_c.push_back(Matrix::Zero(m, n_c));
    c.D_c.push_back(Matrix::Zero(m, p));
  }
  return c;
}

void MultiAgentSystem::Validate() const {
  dynamics.Validate();
  if (graph.n_vertices() != agents()) {
    throw DimensionError("graph size does not match the number of agents");
  }
  if (uncertainty) {
    const auto& u = *uncertainty;
    linalg::RequireSquare(u.J, "uncertainty.J");
    RequireShape(u.R, dynamics.n(), u.m0(), "uncertainty.R");
    RequireShape(u.N, u.m0(), dynamics.n(), "uncertainty.N");
    if (static_cast<int>(u.delta.size()) != agents()) {
      throw DimensionError("uncertainty: expected one delta per agent");
    }
    for (const auto& d : u.delta) RequireShape(d, u.m0(), u.m0(), "uncertainty.delta");
  }
}

Matrix DeltaOf(const Matrix& Z, const Matrix& J) {
  linalg::RequireSquare(Z, "DeltaOf(Z)");
  if (J.rows() != Z.rows() || J.cols() != Z.cols()) {
    throw DimensionError("DeltaOf(): J and Z shapes differ");
  }
  const Matrix M = Matrix::Identity(Z.rows(), Z.cols()) + J * Z;
  // Z M^{-1} = (M^{-T} Z^T)^T
  Eigen::FullPivLU<Matrix> lu(M.transpose());
  if (!lu.isInvertible()) throw NumericalError("DeltaOf(): I + J Z is singular");
  return lu.solve(Z.transpose()).transpose();
}

Matrix WorstCaseDelta(const UncertaintyModel& u) {
  if (u.delta.empty()) throw std::invalid_argument("WorstCaseDelta(): no samples");
  size_t best = 0;
  double best_norm = linalg::SpectralNorm(u.delta[0]);
  for (size_t i = 1; i < u.delta.size(); ++i) {
    const double nrm = linalg::SpectralNorm(u.delta[i]);
    if (nrm > best_norm) {
      best = i;
      best_norm = nrm;
    }
  }
  return u.delta[best];
}

bool InAdmissibleSet(const Matrix& delta, const Matrix& J, double tolerance) {
  const Matrix gap = linalg::Sym(delta) - delta * linalg::Sym(J) * delta.transpose();
  return linalg::SymEigMin(0.5 * (gap + gap.transpose())) >= -tolerance;
}

Augmented Augment(const MultiAgentSystem& sys) {
  const auto& d = sys.dynamics;
  const int N = sys.agents();
  Augmented out;
  out.A_N = Kron(Matrix::Identity(N, N), d.A);
  out.B = BlockDiag(d.B);
  out.C_N = Kron(Matrix::Identity(N, N), d.C);
  out.dA_N = Matrix::Zero(N * d.n(), N * d.n());
  if (sys.uncertainty) {
    const auto& u = *sys.uncertainty;
    for (int i = 0; i < N; ++i) {
      out.dA_N.block(i * d.n(), i * d.n(), d.n(), d.n()) = u.R * u.delta[i] * u.N;
    }
  }
  return out;
}

StackedController Stack(const ControllerRealization& ctrl, int n, int m,
                         int p) {
  (void)n;
  StackedController s;
  s.A_c = BlockDiag(ctrl.A_c);
  s.B_c = BlockDiag(ctrl.B_c);
  s.C_c = BlockDiag(ctrl.C_c);
  s.D_c = BlockDiag(ctrl.D_c);
  const int N = ctrl.agents();
  const auto factors = [&](const std::vector<Perturbation>* list, int rows,
                           int cols, Matrix* D, Matrix* E) {
    if (list == nullptr || list->empty()) {
      *D = Matrix::Zero(N * rows, 0);
      *E = Matrix::Zero(0, N * cols);
      return;
    }
    std::vector<Matrix> Ds, Es;
    for (const auto& pert : *list) {
      Ds.push_back(pert.D);
      Es.push_back(pert.E);
    }
    *D = BlockDiag(Ds);
    *E = BlockDiag(Es);
  };
  const auto* frag = ctrl.fragility ? &*ctrl.fragility : nullptr;
  factors(frag ? &frag->A : nullptr, ctrl.n_c, ctrl.n_c, &s.D_Ac, &s.E_Ac);
  factors(frag ? &frag->B : nullptr, ctrl.n_c, p, &s.D_Bc, &s.E_Bc);
  factors(frag ? &frag->C : nullptr, m, ctrl.n_c, &s.D_Cc, &s.E_Cc);
  factors(frag ? &frag->D : nullptr, m, p, &s.D_Dc, &s.E_Dc);
  return s;
}

ControllerRealization PerturbedAt(const ControllerRealization& ctrl, double t) {
  ControllerRealization out = ctrl;
  out.fragility.reset();
  if (!ctrl.fragility) return out;
  const auto apply = [t](const std::vector<Perturbation>& list,
                         std::vector<Matrix>* mats) {
    for (size_t i = 0; i < list.size(); ++i) (*mats)[i] += list[i].DeltaAt(t);
  };
  apply(ctrl.fragility->A, &out.A_c);
  apply(ctrl.fragility->B, &out.B_c);
  apply(ctrl.fragility->C, &out.C_c);
  apply(ctrl.fragility->D, &out.D_c);
  return out;
}

namespace {

Matrix AssemblePsi(const Matrix& A_reduced, const Matrix& LnB,
                   const StackedController& s, const Matrix& C_r) {
  const Eigen::Index nr = A_reduced.rows();
  const Eigen::Index nc = s.A_c.rows();
  Matrix out(nr + nc, nr + nc);
  out.topLeftCorner(nr, nr) = A_reduced + LnB * s.D_c * C_r;
  out.topRightCorner(nr, nc) = LnB * s.C_c;
  out.bottomLeftCorner(nc, nr) = s.B_c * C_r;
  out.bottomRightCorner(nc, nc) = s.A_c;
  return out;
}

}  // namespace

ClosedLoop BuildClosedLoop(const MultiAgentSystem& sys,
                           const ControllerRealization& ctrl,
                           const topology::LaplacianBundle& bundle,
                           const ClosedLoopOptions& options) {
  const auto& d = sys.dynamics;
  const int N = sys.agents();
  const int n = d.n(), m = d.m(), p = d.p();
  if (bundle.L.rows() != N) throw DimensionError("BuildClosedLoop(): bundle size mismatch");
  ctrl.Validate(N, m, p);

  const Matrix Ln = topology::Lift(bundle.L, n);
  const Matrix Lhat_n = topology::Lift(bundle.L_hat, n);
  const Matrix Lhat_n_pinv = topology::Lift(bundle.L_hat_pinv, n);
  const Augmented aug = Augment(sys);

  ClosedLoop out;
  out.C_r = aug.C_N * Ln * Lhat_n_pinv;
  const Matrix A_reduced = Kron(Matrix::Identity(N - 1, N - 1), d.A);
  const Matrix LnB = Lhat_n * aug.B;

  const StackedController nominal = Stack(ctrl, n, m, p);
  out.A_psi = AssemblePsi(A_reduced, LnB, nominal, out.C_r);
  out.A_delta = Matrix::Zero(out.A_psi.rows(), out.A_psi.cols());

  std::optional<Matrix> delta = options.delta;
  if (!delta && options.use_worst_case_delta && sys.uncertainty) {
    delta = WorstCaseDelta(*sys.uncertainty);
  }
  if (delta) {
    if (!sys.uncertainty) throw std::invalid_argument("BuildClosedLoop(): delta without uncertainty model");
    const auto& u = *sys.uncertainty;
    const Matrix I = Matrix::Identity(N - 1, N - 1);
    const Matrix dA = Kron(I, u.R) * Kron(I, *delta) * Kron(I, u.N);
    out.A_delta.topLeftCorner(dA.rows(), dA.cols()) += dA;
  }
  if (options.fragility_time && ctrl.fragility) {
    const StackedController perturbed =
        Stack(PerturbedAt(ctrl, *options.fragility_time), n, m, p);
    out.A_delta += AssemblePsi(A_reduced, LnB, perturbed, out.C_r) - out.A_psi;
  }
  return out;
}

bool AssumptionReport::AllPassed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const AssumptionCheck* AssumptionReport::Find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Matrix ControllabilityMatrix(const Matrix& A, const Matrix& B) {
  const Eigen::Index n = A.rows();
  Matrix out(n, n * B.cols());
  Matrix block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.block(0, k * B.cols(), n, B.cols()) = block;
    block = A * block;
  }
  return out;
}

Matrix ObservabilityMatrix(const Matrix& A, const Matrix& C) {
  return ControllabilityMatrix(A.transpose(), C.transpose()).transpose();
}

AssumptionReport ValidateAssumptions(const MultiAgentSystem& sys, unsigned seed,
                                     int probes) {
  AssumptionReport report;
  const auto& d = sys.dynamics;
  const int n = d.n();

  {
    AssumptionCheck c{"controllability", true, ""};
    for (int i = 0; i < d.agents(); ++i) {
      const int r = linalg::Rank(ControllabilityMatrix(d.A, d.B[i]));
      if (r != n) {
        c.passed = false;
        c.detail += "agent " + std::to_string(i) + " rank " + std::to_string(r) + "; ";
      }
    }
    report.checks.push_back(c);
  }
  {
    const int r = linalg::Rank(ObservabilityMatrix(d.A, d.C));
    report.checks.push_back({"observability", r == n, "rank " + std::to_string(r)});
  }
  if (sys.uncertainty) {
    const auto& u = *sys.uncertainty;
    const double wmin = linalg::SymEigMin(u.W());
    report.checks.push_back({"sym_J_positive", wmin > 0.0,
                             "min eig " + std::to_string(wmin)});
    if (!u.Z.empty()) {
      AssumptionCheck c{"sym_Z_psd", true, ""};
      for (size_t i = 0; i < u.Z.size(); ++i) {
        if (linalg::SymEigMin(linalg::Sym(u.Z[i])) < -1e-12) {
          c.passed = false;
          c.detail += "agent " + std::to_string(i) + "; ";
        }
      }
      report.checks.push_back(c);
    }
    AssumptionCheck c{"delta_admissible", true, ""};
    for (size_t i = 0; i < u.delta.size(); ++i) {
      if (!InAdmissibleSet(u.delta[i], u.J)) {
        c.passed = false;
        c.detail += "agent " + std::to_string(i) + "; ";
      }
    }
    report.checks.push_back(c);
  }
  if (sys.nonlinearity) {
    const auto& nl = *sys.nonlinearity;
    const Vector zero = nl.phi(Vector::Zero(n), Vector::Zero(d.m()), 0.0);
    report.checks.push_back({"phi_zero_at_origin", zero.norm() <= 1e-12,
                             "|phi(0,0)| = " + std::to_string(zero.norm())});

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> xdist(-2.0, 2.0), udist(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
      Vector x1(n), x2(n), u(d.m());
      for (int i = 0; i < n; ++i) {
        x1(i) = xdist(rng);
        x2(i) = x1(i) + 0.1 * xdist(rng);
      }
      for (int i = 0; i < d.m(); ++i) u(i) = udist(rng);
      const double dx = (x1 - x2).norm();
      if (dx == 0.0) continue;
      worst = std::max(worst, (nl.phi(x1, u, 0.0) - nl.phi(x2, u, 0.0)).norm() / dx);
    }
    report.checks.push_back({"lipschitz_sampled", worst <= nl.xi1 * (1.0 + 1e-12),
                             "max ratio " + std::to_string(worst) + " vs xi1 " +
                                 std::to_string(nl.xi1)});
  }
  return report;
}

}  // namespace plant
}  // namespace fomas
