#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fomas/linalg.hpp"
#include "fomas/topology.hpp"

namespace fomas {
namespace plant {

/// Nominal agent model D^q x_i = Ã x_i + B_i u_i, y_i = C̃ x_i.
struct AgentDynamics {
  Matrix A;
  std::vector<Matrix> B;  // one n x m matrix per agent
  Matrix C;
  double q = 0.5;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return B.empty() ? 0 : static_cast<int>(B.front().cols()); }
  int p() const { return static_cast<int>(C.rows()); }
  int agents() const { return static_cast<int>(B.size()); }

  /// Throws on inconsistent dimensions or q outside (0, 1).
  void Validate() const;
};

/// Positive-real parametric uncertainty ΔÃ_i = R̃ δ_i Ñ with
/// δ_i = Z_i (I + J Z_i)^{-1}.
struct UncertaintyModel {
  Matrix R;                   // n x m0
  Matrix N;                   // m0 x n
  Matrix J;                   // m0 x m0
  std::vector<Matrix> Z;      // optional, one per agent
  std::vector<Matrix> delta;  // one per agent; derived from Z when given

  int m0() const { return static_cast<int>(J.rows()); }

  /// Builds the model from Z samples, computing δ_i through DeltaOf.
  static UncertaintyModel FromZ(Matrix R, Matrix N, Matrix J,
                                std::vector<Matrix> Z);
  /// Builds the model from directly supplied δ_i samples.
  static UncertaintyModel FromDelta(Matrix R, Matrix N, Matrix J,
                                    std::vector<Matrix> delta);

  /// sym(J), the weight of the admissible set.
  Matrix W() const { return linalg::Sym(J); }
};

/// phi(x, u, t) for a single agent.
using NonlinearFn =
    std::function<Vector(const Vector& x, const Vector& u, double t)>;

struct NonlinearSpec {
  std::string name;
  NonlinearFn phi;
  double xi1 = 0.0;  // Lipschitz constant in x
};

/// Registered nonlinearities: "pmsm_sin" (n = 2, m = 1) and "none".
/// Returns std::nullopt for "none"; throws std::invalid_argument for an
/// unknown name.
std::optional<NonlinearSpec> MakeNonlinearity(const std::string& name,
                                              double xi1);

/// One scalar entry of a time-varying perturbation F(t):
/// gain * fn(freq * t + phase), fn ∈ {sin, cos, const}.
struct FragilityAtom {
  enum class Kind { kZero, kConst, kSin, kCos };
  Kind kind = Kind::kZero;
  double gain = 0.0;
  double freq = 1.0;
  double phase = 0.0;

  double operator()(double t) const;
};

/// Norm-bounded controller perturbation D F(t) E for one agent and one
/// controller matrix.
struct Perturbation {
  Matrix D;
  Matrix E;
  std::vector<std::vector<FragilityAtom>> F;  // rows x cols grid of atoms

  Matrix FAt(double t) const;
  Matrix DeltaAt(double t) const { return D * FAt(t) * E; }
};

/// Per-agent perturbations of (A_c, B_c, C_c, D_c). Each list is either
/// empty (no perturbation) or holds one entry per agent.
struct ControllerFragility {
  std::vector<Perturbation> A, B, C, D;

  bool empty() const { return A.empty() && B.empty() && C.empty() && D.empty(); }
};

/// Dynamic output-feedback controller of order n_c per agent.
struct ControllerRealization {
  int n_c = 0;
  std::vector<Matrix> A_c;  // n_c x n_c
  std::vector<Matrix> B_c;  // n_c x p
  std::vector<Matrix> C_c;  // m x n_c
  std::vector<Matrix> D_c;  // m x p
  std::optional<ControllerFragility> fragility;

  int agents() const { return static_cast<int>(D_c.size()); }

  /// Checks block shapes against the plant dimensions.
  void Validate(int agents, int m, int p) const;

  /// Static output feedback u_i = D_ci (L_p y)_i.
  static ControllerRealization Static(std::vector<Matrix> D_c, int p);
  /// All-zero controller of order n_c.
  static ControllerRealization Zero(int agents, int n_c, int m, int p);
};

struct MultiAgentSystem {
  AgentDynamics dynamics;
  std::optional<UncertaintyModel> uncertainty;
  std::optional<NonlinearSpec> nonlinearity;
  topology::DirectedGraph graph{Matrix::Zero(0, 0)};

  int agents() const { return dynamics.agents(); }
  void Validate() const;
};

/// Z (I + J Z)^{-1}. Throws NumericalError when I + J Z is singular.
Matrix DeltaOf(const Matrix& Z, const Matrix& J);

/// The δ_i of largest spectral norm (first one on ties).
Matrix WorstCaseDelta(const UncertaintyModel& u);

/// True when δ·sym(J)·δᵀ ⪯ sym(δ) up to `tolerance` on the minimum
/// eigenvalue.
bool InAdmissibleSet(const Matrix& delta, const Matrix& J,
                     double tolerance = 1e-9);

struct Augmented {
  Matrix A_N;   // I_N ⊗ Ã
  Matrix B;     // blockdiag(B_i)
  Matrix C_N;   // I_N ⊗ C̃
  Matrix dA_N;  // blockdiag(R̃ δ_i Ñ), zero without uncertainty
};

Augmented Augment(const MultiAgentSystem& sys);

/// Block-diagonal controller and fragility matrices stacked over agents.
struct StackedController {
  Matrix A_c, B_c, C_c, D_c;
  // Fragility factors; zero-column D and zero-row E when absent.
  Matrix D_Ac, E_Ac, D_Bc, E_Bc, D_Cc, E_Cc, D_Dc, E_Dc;
};

StackedController Stack(const ControllerRealization& ctrl, int n, int m,
                        int p);

/// Controller matrices with the fragility perturbation applied at time t.
ControllerRealization PerturbedAt(const ControllerRealization& ctrl, double t);

struct ClosedLoopOptions {
  /// Uncertainty replicated on the reduced coordinates. Defaults to the
  /// worst-case δ when the system carries an uncertainty model.
  std::optional<Matrix> delta;
  bool use_worst_case_delta = true;
  /// Evaluate the controller fragility at this time.
  std::optional<double> fragility_time;
};

struct ClosedLoop {
  Matrix A_psi;
  Matrix A_delta;
  Matrix C_r;

  Matrix Total() const { return A_psi + A_delta; }
};

/// Transformed closed loop on X = [x_r; x_c] with x_r = L̂_n x.
ClosedLoop BuildClosedLoop(const MultiAgentSystem& sys,
                           const ControllerRealization& ctrl,
                           const topology::LaplacianBundle& bundle,
                           const ClosedLoopOptions& options = {});

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool AllPassed() const;
  const AssumptionCheck* Find(const std::string& name) const;
};

/// Runs the rank, positivity, origin and sampled-Lipschitz checks. Failures
/// are recorded in the report; nothing throws.
AssumptionReport ValidateAssumptions(const MultiAgentSystem& sys,
                                     unsigned seed = 7, int probes = 200);

/// [B, AB, ..., A^{n-1}B]
Matrix ControllabilityMatrix(const Matrix& A, const Matrix& B);
/// [C; CA; ...; CA^{n-1}]
Matrix ObservabilityMatrix(const Matrix& A, const Matrix& C);

}  // namespace plant
}  // namespace fomas
