#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fomas/fracsim.hpp"
#include "fomas/plant.hpp"
#include "fomas/synthesis.hpp"

namespace fomas {
namespace scenario {

/// Malformed or inconsistent scenario configuration.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthesisRequest {
  synthesis::Method method = synthesis::Method::kTheorem2;
  int n_c = 0;
  synthesis::PiMode pi_mode = synthesis::PiMode::kWeighted;
};

/// Fragility data for one controller order.
struct FragilityEntry {
  int n_c = 0;
  plant::ControllerFragility fragility;
};

struct Scenario {
  std::string name;
  plant::MultiAgentSystem system;
  // Exactly one of the two controller sources is set.
  std::optional<SynthesisRequest> synthesize;
  std::optional<plant::ControllerRealization> fixed;
  std::vector<FragilityEntry> fragility;
  fracsim::SimConfig sim;
  Vector x0;
  std::string output_dir = "out";

  /// Controller order in effect (synthesis request or fixed controller).
  int n_c() const;
  /// Fragility entry matching `n_c`, if any.
  std::optional<plant::ControllerFragility> FragilityFor(int n_c) const;
  /// Cross-validates dimensions; throws ScenarioError.
  void Validate() const;
};

/// Parses a scenario document. Throws ScenarioError on missing fields, bad
/// shapes or unknown names.
Scenario FromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Scenario& s);

/// Loads a scenario file, or a built-in scenario when `path_or_name` names
/// one and no such file exists.
Scenario Load(const std::string& path_or_name);
void Save(const Scenario& s, const std::string& path);

/// Built-in scenarios: "pmsm" (Theorem 2, n_c = 1, with the controller
/// fragility table), "numeric" (Corollary 1, n_c = 1) and
/// "pmsm-fixed-0", "pmsm-fixed-1", "pmsm-fixed-2" (fixed published
/// PMSM controllers of order 0, 1, 2).
std::vector<std::string> BuiltinNames();
std::optional<Scenario> Builtin(const std::string& name);

/// The PMSM multi-motor plant: three agents on a directed ring.
plant::MultiAgentSystem PmsmSystem(double xi1 = 1.5);
/// The four-agent linear example on an undirected ring.
plant::MultiAgentSystem NumericSystem();
/// Published PMSM controller of order 0, 1 or 2.
plant::ControllerRealization PmsmPublishedController(int n_c);
/// Published PMSM controller fragility for order 0 (D_c row only), 1 or 2.
plant::ControllerFragility PmsmFragility(int n_c);
/// Documented initial states used by the built-in scenarios.
Vector PmsmInitialState();
Vector NumericInitialState();

}  // namespace scenario
}  // namespace fomas
