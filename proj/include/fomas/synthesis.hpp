#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fomas/lmi.hpp"
#include "fomas/plant.hpp"
#include "fomas/topology.hpp"

namespace fomas {
namespace synthesis {

/// How the norm terms of the Π block enter the Theorem 2 inequality.
/// kWeighted scales squared norms by the matching S-procedure multiplier
/// (τ1‖E_Dc C_r‖² + τ4‖E_Bc C_r‖² + τ3ξ on the state block); kLiteral uses
/// unweighted, unsquared norms plus ξ.
enum class PiMode { kWeighted, kLiteral };

enum class Method { kTheorem2, kCorollary1 };

const char* MethodName(Method m);
Method ParseMethod(const std::string& name);

/// Range restriction that makes the controller recovery exact.
/// Theorem 2: p̄_u B_i = G_i Y_i, 𝔡_i = G_i 𝔡̃_i, 𝔠_i = G_i 𝔠̃_i.
/// Corollary 1: C̃ p̄_u = Y H, 𝔡_i = 𝔡̃_i H, 𝔟_i = 𝔟̃_i H.
/// With `fixed` set the controller is held constant instead and only the
/// Lyapunov matrix and multipliers remain free (an analysis problem).
struct Anchor {
  std::vector<Matrix> G;  // Theorem 2, one n x m per agent
  Matrix H;               // Corollary 1, p x n
  std::optional<plant::ControllerRealization> fixed;
};

struct Options {
  int n_c = 0;
  std::optional<plant::ControllerFragility> fragility;
  PiMode pi_mode = PiMode::kWeighted;
  int max_dim = 500;
  /// Rounds of alternating analysis / restricted synthesis after the
  /// first restricted solve fails.
  int max_rounds = 12;
};

/// Dimensions and constant matrices of the reduced closed loop.
struct ReducedData {
  int N = 0, n = 0, m = 0, p = 0, n_c = 0;
  topology::LaplacianBundle bundle;
  Matrix Gamma;  // L L̂†
  Matrix C_r;    // (I_N ⊗ C̃)(L ⊗ I_n)(L̂ ⊗ I_n)†
  Matrix LnB;    // (L̂ ⊗ I_n) blockdiag(B_i)
  Matrix A_red;  // I_{N-1} ⊗ Ã
  int dim_r() const { return (N - 1) * n; }
  int dim() const { return (N - 1) * n + N * n_c; }
};

ReducedData MakeReducedData(const plant::MultiAgentSystem& sys, int n_c);

struct AssembledProblem {
  Method method = Method::kTheorem2;
  lmi::Problem problem;
  ReducedData data;
  int leading_dim = 0;  // dimension of the closed-loop state block
  int lmi_dim = 0;      // full dimension of the main inequality
  bool restricted = false;
  // Controller-shaped expressions (evaluate with FeasibilityResult::x).
  lmi::Expr pu;
  std::vector<lmi::Expr> pd, a, b, c, d;
  std::array<std::optional<lmi::Expr>, 5> tau;
  std::optional<lmi::Expr> mu;
  double xi = 0.0;
};

/// Builds the Theorem 2 LMI (P A form). Throws std::invalid_argument
/// without an uncertainty model and DimensionError when the state block
/// exceeds opts.max_dim.
AssembledProblem AssembleTheorem2(const plant::MultiAgentSystem& sys,
                                  const Options& opts,
                                  const Anchor* anchor = nullptr);

/// Builds the Corollary 1 LMI (A P form) for systems without nonlinearity.
AssembledProblem AssembleCorollary1(const plant::MultiAgentSystem& sys,
                                    const Options& opts,
                                    const Anchor* anchor = nullptr);

struct Recovery {
  plant::ControllerRealization controller;
  /// max over agents of ‖p̄_u B_i D_ci - 𝔡_i‖ and ‖p̄_u B_i C_ci - 𝔠_i‖
  /// (Theorem 2), or ‖D_ci C̃ p̄_u - 𝔡_i‖ and ‖B_ci C̃ p̄_u - 𝔟_i‖
  /// (Corollary 1), relative to the variable's norm.
  double residual = 0.0;
};

/// A_c = P_d⁻¹𝔄, B_c = P_d⁻¹𝔅, C_ci = (p̄_u B_i)†𝔠_i, D_ci = (p̄_u B_i)†𝔡_i.
Recovery RecoverTheorem2(const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                         const plant::MultiAgentSystem& sys);
/// A_c = 𝔄P_d⁻¹, C_c = ℭP_d⁻¹, B_ci = 𝔟_i p̄_u⁻¹C̃†, D_ci = 𝔡_i p̄_u⁻¹C̃†.
/// Throws std::invalid_argument when C̃ lacks full row rank.
Recovery RecoverCorollary1(const AssembledProblem& ap, const lmi::FeasibilityResult& r,
                           const plant::MultiAgentSystem& sys);

/// Multipliers attached to a solution, for the fixed-variable check.
struct Scalars {
  std::array<double, 5> tau{0, 0, 0, 0, 0};
  double mu = 0.0;
  double xi = 0.0;
};

struct SynthesisReport {
  Method method = Method::kTheorem2;
  lmi::Status status = lmi::Status::kSolverFailure;
  double margin = 0.0;
  std::string stage;  // "restricted", "analysis" or "relaxed"
  /// True when the controller comes with an exactly matching LMI solution,
  /// i.e. a fixed-variable certificate (P, multipliers) for it.
  bool certified = false;
  int rounds = 0;
  int leading_dim = 0;
  int iterations = 0;
  double solve_seconds = 0.0;
  lmi::FeasibilityResult relaxed;
  std::optional<lmi::FeasibilityResult> restricted;
  std::optional<plant::ControllerRealization> controller;
  double recovery_residual = 0.0;
  Matrix P;  // block-diagonal Lyapunov matrix of the accepted stage
  Scalars scalars;
  std::string message;
};

/// Solves the relaxed LMI (its infeasibility is final), anchors the
/// controller ranges on the relaxed solution and solves the restricted LMI,
/// whose recovery is exact. When that fails, alternates a fixed-controller
/// analysis solve with a restricted solve anchored on the analysis P; the
/// margin cannot decrease from one solve to the next. Without success the
/// pseudo-inverse recovery of the relaxed solution is returned uncertified;
/// `status` is always that of the relaxed LMI.
SynthesisReport Synthesize(const plant::MultiAgentSystem& sys, Method method,
                           const Options& opts,
                           const lmi::SolverOptions& solver = {});

}  // namespace synthesis
}  // namespace fomas
