#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fomas/linalg.hpp"
#include "fomas/mittag_leffler.hpp"
#include "fomas/plant.hpp"

namespace fomas {
namespace fracsim {

enum class Scheme { kGrunwaldLetnikov, kPredictorCorrector };

const char* SchemeName(Scheme s);
Scheme ParseScheme(const std::string& name);

struct SimConfig {
  double t_end = 5.0;
  double dt = 1e-3;
  /// History length of the memory sum; std::nullopt keeps the full history.
  std::optional<int> memory;
  Scheme scheme = Scheme::kGrunwaldLetnikov;

  int steps() const;
  /// Throws std::invalid_argument unless 0 < dt ≤ t_end and memory ≥ 1.
  void Validate() const;
};

/// Raised when a trajectory turns non-finite or grows by more than 1e6 in a
/// single step.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Sampled closed-loop trajectory. Row k of every matrix belongs to times[k];
/// columns are agent-major (agent i occupies columns [i·dim, (i+1)·dim)).
struct Trajectory {
  int agents = 0, n = 0, n_c = 0, m = 0;
  std::vector<double> times;
  Matrix x;   // steps x (agents·n)
  Matrix xc;  // steps x (agents·n_c)
  Matrix u;   // steps x (agents·m)
  Matrix e;   // steps x agents, consensus errors

  int steps() const { return static_cast<int>(times.size()); }
  Vector AgentState(int step, int agent) const;
};

/// Grünwald-Letnikov binomial weights w_j = (-1)^j C(q, j), j = 0..count-1.
std::vector<double> GlWeights(double q, int count);

/// Solves D^q x = λ x, x(0) = x0 on the grid of `cfg`, for the scalar oracle.
std::vector<double> SimulateScalar(double lambda, double q, double x0, const SimConfig& cfg);

/// Simulates the coupled plant and controller from stacked agent states
/// `x0` (controller states start at zero). The plant carries each agent's
/// own δ_i; the nonlinearity and the controller fragility are evaluated at
/// the previous step. With the GL scheme the linear part is implicit.
/// Throws DivergenceError, and std::invalid_argument for sampled fragility
/// norms above one.
Trajectory Simulate(const plant::MultiAgentSystem& sys,
                    const plant::ControllerRealization& ctrl, const Vector& x0,
                    const SimConfig& cfg);

/// e_i(t_k) = Σ_{j≠i} ‖x_i(t_k) - x_j(t_k)‖, steps x agents.
Matrix ConsensusError(const Trajectory& traj);

struct ErrorIndices {
  Vector ise, iae, itse, itae;  // one entry per agent
};

/// Trapezoidal integrals of e², |e|, t·e² and t·|e| for each column of e.
ErrorIndices ComputeErrorIndices(const std::vector<double>& times, const Matrix& e);
inline ErrorIndices ComputeErrorIndices(const Trajectory& traj) {
  return ComputeErrorIndices(traj.times, traj.e);
}

struct ConsensusVerdict {
  bool passed = false;
  double final_max = 0.0;    // max_i e_i(T)
  double initial_max = 0.0;  // max_i e_i(0)
  double threshold = 0.0;
};

/// Passes when max_i e_i(T) ≤ max(floor, fraction · max_i e_i(0)).
ConsensusVerdict JudgeConsensus(const Trajectory& traj, double fraction = 0.01,
                                double floor = 1e-2);

struct FragilityScan {
  double max_norm = 0.0;  // max over sampled t of ‖F(t)‖₂
  double argmax_t = 0.0;
  bool on_boundary = false;  // ‖F(t)‖ reached 1 within 1e-12
};

/// Samples every F(t) of `f` on [0, t_end] with step dt. Throws
/// std::invalid_argument when some ‖F(t)‖ exceeds 1 + 1e-12.
FragilityScan CheckFragility(const plant::ControllerFragility& f, double t_end, double dt);

/// Copy of `f` with every atom's phase drawn uniformly from [0, 2π).
plant::ControllerFragility RandomizePhases(const plant::ControllerFragility& f,
                                           std::mt19937_64& rng);

/// Writes the trajectory as CSV with header t, x[i][k]..., xc[i][k]...,
/// u[i][k]..., e[i]...; 9 significant digits.
void WriteCsv(const Trajectory& traj, const std::string& path);

}  // namespace fracsim
}  // namespace fomas
