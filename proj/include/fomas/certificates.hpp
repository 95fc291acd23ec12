#pragma once

#include <string>

#include "fomas/lmi.hpp"
#include "fomas/plant.hpp"
#include "fomas/synthesis.hpp"

namespace fomas {
namespace certificates {

/// Builds the Lemma 1 stability LMI for D^q x = A x: variables X11, X21
/// symmetric and X12, X22 skew, with Σ Sym{Θ_ij ⊗ (A X_ij)} ≺ 0 and
/// [X_k1, X_k2; -X_k2, X_k1] ≻ 0, θ = qπ/2.
lmi::Problem Lemma1Problem(const Matrix& A, double q);

/// Solves the Lemma 1 LMI.
lmi::FeasibilityResult CertifyLemma1(const Matrix& A, double q,
                                     const lmi::SolverOptions& opts = {});

enum class Verdict { kStable, kUnstable, kUndecided };

const char* VerdictName(Verdict v);

struct ArgumentReport {
  Verdict verdict = Verdict::kUndecided;
  double min_arg = 0.0;  // min_i |arg λ_i|
  double margin = 0.0;   // min_arg - qπ/2
  std::string detail;
};

/// Eigenvalue-argument criterion: stable iff min |arg λ| > qπ/2. An
/// eigenvalue within `zero_tol` of the origin makes the verdict undecided.
ArgumentReport CertifyArgument(const Matrix& A, double q, double zero_tol = 1e-10);

struct Theorem1Check {
  bool holds = false;
  double max_eigenvalue = 0.0;
};

/// Evaluates the Theorem 1 block inequality for a fixed P, controller and
/// multipliers (nominal controller, stacked fragility factors from
/// `ctrl.fragility`).
Theorem1Check CheckTheorem1(const Matrix& P, const plant::ControllerRealization& ctrl,
                            const plant::MultiAgentSystem& sys,
                            const synthesis::Scalars& scalars,
                            synthesis::PiMode mode = synthesis::PiMode::kWeighted);

}  // namespace certificates
}  // namespace fomas
