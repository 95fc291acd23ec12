#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "fomas/scenario.hpp"

namespace fomas {
namespace commands {

/// Process exit codes of fomas-lab.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kInfeasible = 2,
  kSolverFailure = 3,
  kDivergence = 4,
};

struct CommandOptions {
  std::optional<int> n_c;
  std::optional<synthesis::Method> method;
  bool paper_literal_pi = false;
  /// Output directory; empty means the scenario's outputs.dir. Nothing is
  /// written when `write_files` is false.
  std::string out_dir;
  bool write_files = true;
  std::uint64_t seed = 1;
  int draws = 20;
};

struct RunReport {
  int exit_code = kOk;
  nlohmann::json report;
};

/// Applies command-line overrides (order, method, Π form) to a scenario.
/// An order override on a fixed controller is a config error.
scenario::Scenario ApplyOverrides(scenario::Scenario s, const CommandOptions& opts);

/// Assembles, solves, recovers and certifies; writes controller.json and
/// report.json. Exit 2 when the LMI is infeasible, 3 on solver failure.
RunReport CmdSynth(const scenario::Scenario& s, const CommandOptions& opts);

/// Simulates the scenario's controller (synthesizing first when needed);
/// writes trajectory.csv, indices.json and report.json. Exit 4 on
/// divergence. A failed consensus verdict is not an error.
RunReport CmdSimulate(const scenario::Scenario& s, const CommandOptions& opts);

/// Closed-loop certificates (eigenvalue argument and Lemma 1) plus the
/// fixed-variable Theorem 1 check when synthesis supplies P and multipliers.
RunReport CmdVerify(const scenario::Scenario& s, const CommandOptions& opts);

/// `draws` simulations with admissible δ_i and random fragility phases.
/// Deterministic for a fixed seed.
RunReport CmdSweep(const scenario::Scenario& s, const CommandOptions& opts);

/// Draws an admissible δ for the given J: δ = Z (I + J Z)⁻¹ with random
/// Z = G Gᵀ + (K - Kᵀ).
Matrix SampleAdmissibleDelta(const Matrix& J, std::mt19937_64& rng);

/// Verbosity from FOMAS_LOG: error, warn (default), info, debug.
enum class LogLevel { kError, kWarn, kInfo, kDebug };
LogLevel CurrentLogLevel();
void Log(LogLevel level, const std::string& message);

}  // namespace commands
}  // namespace fomas
