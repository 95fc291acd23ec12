#include "fomas/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fomas/certificates.hpp"
#include "fomas/fracsim.hpp"

namespace fomas {
namespace commands {

using nlohmann::json;
namespace fs = std::filesystem;

LogLevel CurrentLogLevel() {
  const char* env = std::getenv("FOMAS_LOG");
  if (!env) return LogLevel::kWarn;
  const std::string v = env;
  if (v == "error") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void Log(LogLevel level, const std::string& message) {
  if (level > CurrentLogLevel()) return;
  static const char* const kNames[] = {"error", "warn", "info", "debug"};
  std::cerr << "fomas-lab [" << kNames[static_cast<int>(level)] << "] " << message << "\n";
}

namespace {

json MatrixJson(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json VectorJson(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json ControllerJson(const plant::ControllerRealization& c) {
  const auto list = [](const std::vector<Matrix>& l) {
    json out = json::array();
    for (const auto& m : l) out.push_back(MatrixJson(m));
    return out;
  };
  return json{{"n_c", c.n_c},
              {"A_c", list(c.A_c)},
              {"B_c", list(c.B_c)},
              {"C_c", list(c.C_c)},
              {"D_c", list(c.D_c)}};
}

json AssumptionsJson(const plant::AssumptionReport& r) {
  json out = json::array();
  for (const auto& c : r.checks) {
    out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return out;
}

json IndicesJson(const fracsim::ErrorIndices& idx) {
  return json{{"ise", VectorJson(idx.ise)},
              {"iae", VectorJson(idx.iae)},
              {"itse", VectorJson(idx.itse)},
              {"itae", VectorJson(idx.itae)}};
}

class Output {
 public:
  Output(const scenario::Scenario& s, const CommandOptions& opts)
      : enabled_(opts.write_files), dir_(opts.out_dir.empty() ? s.output_dir : opts.out_dir) {}

  bool enabled() const { return enabled_; }
  std::string Path(const std::string& file) {
    fs::create_directories(dir_);
    return (fs::path(dir_) / file).string();
  }
  void WriteJson(const std::string& file, const json& j) {
    if (!enabled_) return;
    const std::string path = Path(file);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    files_.push_back(path);
  }
  void Record(const std::string& path) { files_.push_back(path); }
  const std::vector<std::string>& files() const { return files_; }

 private:
  bool enabled_;
  std::string dir_;
  std::vector<std::string> files_;
};

// Writes report.json (listing every file written so far, itself included).
RunReport Finish(json report, int code, Output& out) {
  report["exit_code"] = code;
  if (out.enabled()) {
    const std::string path = out.Path("report.json");
    std::vector<std::string> files = out.files();
    files.push_back(path);
    report["files"] = files;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << report.dump(2) << "\n";
  } else {
    report["files"] = json::array();
  }
  return RunReport{code, std::move(report)};
}

struct Obtained {
  int exit_code = kOk;
  std::optional<plant::ControllerRealization> controller;
  std::optional<synthesis::SynthesisReport> synthesis;
  synthesis::PiMode pi_mode = synthesis::PiMode::kWeighted;
};

json SynthesisJson(const synthesis::SynthesisReport& r) {
  json j{{"method", synthesis::MethodName(r.method)},
         {"status", lmi::StatusName(r.status)},
         {"margin", r.margin},
         {"relaxed_margin", r.relaxed.margin},
         {"relaxed_upper_bound", r.relaxed.upper_bound},
         {"stage", r.stage},
         {"certified", r.certified},
         {"rounds", r.rounds},
         {"leading_dim", r.leading_dim},
         {"iterations", r.iterations},
         {"recovery_residual", r.recovery_residual},
         {"message", r.message}};
  if (r.controller) j["controller"] = ControllerJson(*r.controller);
  return j;
}

Obtained ObtainController(const scenario::Scenario& s, json& report) {
  Obtained out;
  if (s.fixed) {
    out.controller = *s.fixed;
    out.controller->fragility = s.FragilityFor(s.fixed->n_c);
    report["controller_source"] = "fixed";
    return out;
  }
  const scenario::SynthesisRequest& req = *s.synthesize;
  synthesis::Options o;
  o.n_c = req.n_c;
  o.fragility = s.FragilityFor(req.n_c);
  o.pi_mode = req.pi_mode;
  out.pi_mode = req.pi_mode;
  report["controller_source"] = "synthesize";
  Log(LogLevel::kInfo, std::string("synthesizing with ") + synthesis::MethodName(req.method) +
                           ", n_c = " + std::to_string(req.n_c));
  synthesis::SynthesisReport r = synthesis::Synthesize(s.system, req.method, o);
  Log(LogLevel::kInfo, std::string("synthesis ") + lmi::StatusName(r.status) + " (stage " + r.stage +
                           ", margin " + std::to_string(r.margin) + ")");
  report["synthesis"] = SynthesisJson(r);
  switch (r.status) {
    case lmi::Status::kStrictlyFeasible:
      break;
    case lmi::Status::kSolverFailure:
      out.exit_code = kSolverFailure;
      break;
    default:
      out.exit_code = kInfeasible;
      break;
  }
  if (out.exit_code == kOk && r.controller) {
    out.controller = *r.controller;
    out.controller->fragility = o.fragility;
  }
  out.synthesis = std::move(r);
  return out;
}

json CertificatesJson(const scenario::Scenario& s, const plant::ControllerRealization& ctrl,
                      const std::optional<synthesis::SynthesisReport>& synth,
                      synthesis::PiMode mode, bool* stable) {
  const auto bundle = topology::Reduce(topology::Laplacian(s.system.graph));
  const plant::ClosedLoop cl = plant::BuildClosedLoop(s.system, ctrl, bundle);
  const double q = s.system.dynamics.q;
  const certificates::ArgumentReport arg = certificates::CertifyArgument(cl.Total(), q);
  const lmi::FeasibilityResult lemma = certificates::CertifyLemma1(cl.Total(), q);
  json j;
  j["closed_loop_dim"] = cl.A_psi.rows();
  j["argument"] = {{"verdict", certificates::VerdictName(arg.verdict)},
                   {"min_arg", arg.min_arg},
                   {"margin", arg.margin}};
  j["lemma1"] = {{"status", lmi::StatusName(lemma.status)}, {"margin", lemma.margin}};
  j["agree"] = (arg.verdict == certificates::Verdict::kStable) == lemma.feasible();
  if (synth && synth->method == synthesis::Method::kTheorem2 && s.system.uncertainty &&
      synth->P.rows() == cl.A_psi.rows()) {
    const certificates::Theorem1Check t =
        certificates::CheckTheorem1(synth->P, ctrl, s.system, synth->scalars, mode);
    j["theorem1"] = {{"holds", t.holds}, {"max_eigenvalue", t.max_eigenvalue}};
  }
  if (stable) *stable = arg.verdict == certificates::Verdict::kStable && lemma.feasible();
  return j;
}

}  // namespace

scenario::Scenario ApplyOverrides(scenario::Scenario s, const CommandOptions& opts) {
  if (s.synthesize) {
    if (opts.n_c) s.synthesize->n_c = *opts.n_c;
    if (opts.method) s.synthesize->method = *opts.method;
    if (opts.paper_literal_pi) s.synthesize->pi_mode = synthesis::PiMode::kLiteral;
  } else if (opts.n_c && *opts.n_c != s.fixed->n_c) {
    throw scenario::ScenarioError("--nc cannot change the order of a fixed controller");
  } else if (opts.method) {
    throw scenario::ScenarioError("--method needs a scenario that synthesizes its controller");
  }
  s.Validate();
  return s;
}

RunReport CmdSynth(const scenario::Scenario& s, const CommandOptions& opts) {
  Output out(s, opts);
  json report{{"command", "synth"}, {"scenario", s.name}};
  report["assumptions"] = AssumptionsJson(plant::ValidateAssumptions(s.system));
  if (!s.synthesize) throw scenario::ScenarioError("synth needs a scenario with a synthesize controller");
  Obtained got = ObtainController(s, report);
  if (got.exit_code != kOk) return Finish(report, got.exit_code, out);
  report["certificates"] = CertificatesJson(s, *got.controller, got.synthesis, got.pi_mode, nullptr);
  out.WriteJson("controller.json", ControllerJson(*got.controller));
  return Finish(report, kOk, out);
}

RunReport CmdVerify(const scenario::Scenario& s, const CommandOptions& opts) {
  Output out(s, opts);
  json report{{"command", "verify"}, {"scenario", s.name}};
  report["assumptions"] = AssumptionsJson(plant::ValidateAssumptions(s.system));
  Obtained got = ObtainController(s, report);
  if (got.exit_code != kOk) return Finish(report, got.exit_code, out);
  bool stable = false;
  report["certificates"] = CertificatesJson(s, *got.controller, got.synthesis, got.pi_mode, &stable);
  report["stable"] = stable;
  return Finish(report, kOk, out);
}

RunReport CmdSimulate(const scenario::Scenario& s, const CommandOptions& opts) {
  Output out(s, opts);
  json report{{"command", "simulate"}, {"scenario", s.name}};
  report["assumptions"] = AssumptionsJson(plant::ValidateAssumptions(s.system));
  Obtained got = ObtainController(s, report);
  if (got.exit_code != kOk) return Finish(report, got.exit_code, out);
  if (got.controller->fragility) {
    const fracsim::FragilityScan scan =
        fracsim::CheckFragility(*got.controller->fragility, s.sim.t_end, s.sim.dt);
    if (scan.on_boundary) {
      Log(LogLevel::kWarn, "fragility reaches ||F(t)|| = 1 at t = " + std::to_string(scan.argmax_t));
    }
    report["fragility"] = {{"max_norm", scan.max_norm}, {"on_boundary", scan.on_boundary}};
  }
  fracsim::Trajectory traj;
  try {
    traj = fracsim::Simulate(s.system, *got.controller, s.x0, s.sim);
  } catch (const fracsim::DivergenceError& e) {
    Log(LogLevel::kError, e.what());
    report["simulation"] = {{"diverged", true}, {"step", e.step()}, {"message", e.what()}};
    return Finish(report, kDivergence, out);
  }
  const fracsim::ConsensusVerdict v = fracsim::JudgeConsensus(traj);
  const fracsim::ErrorIndices idx = fracsim::ComputeErrorIndices(traj);
  report["simulation"] = {{"diverged", false},
                          {"steps", traj.steps()},
                          {"scheme", fracsim::SchemeName(s.sim.scheme)},
                          {"verdict", v.passed ? "pass" : "fail"},
                          {"initial_max_error", v.initial_max},
                          {"final_max_error", v.final_max},
                          {"threshold", v.threshold},
                          {"indices", IndicesJson(idx)}};
  if (out.enabled()) {
    const std::string csv = out.Path("trajectory.csv");
    fracsim::WriteCsv(traj, csv);
    out.Record(csv);
    out.WriteJson("indices.json", IndicesJson(idx));
  }
  return Finish(report, kOk, out);
}

Matrix SampleAdmissibleDelta(const Matrix& J, std::mt19937_64& rng) {
  const Eigen::Index k = J.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(k, k), K(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      G(i, j) = normal(rng);
      K(i, j) = normal(rng);
    }
  }
  std::exponential_distribution<double> scale(1.0);
  const Matrix Z = scale(rng) * (G * G.transpose()) / static_cast<double>(k) + 0.5 * (K - K.transpose());
  return plant::DeltaOf(Z, J);
}

RunReport CmdSweep(const scenario::Scenario& s, const CommandOptions& opts) {
  Output out(s, opts);
  json report{{"command", "sweep"}, {"scenario", s.name}, {"draws", opts.draws}, {"seed", opts.seed}};
  if (opts.draws < 0) throw scenario::ScenarioError("--draws must be >= 0");
  if (!s.system.uncertainty && s.fragility.empty()) {
    throw scenario::ScenarioError("sweep needs an uncertainty model or controller fragility");
  }
  if (opts.draws == 0) {
    report["results"] = json::array();
    report["passed"] = 0;
    report["pass_rate"] = nullptr;
    return Finish(report, kOk, out);
  }
  Obtained got = ObtainController(s, report);
  if (got.exit_code != kOk) return Finish(report, got.exit_code, out);

  json results = json::array();
  int passed = 0;
  double worst_ratio = 0.0, worst_ise = 0.0;
  for (int d = 0; d < opts.draws; ++d) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(d)};
    std::mt19937_64 rng(seq);
    plant::MultiAgentSystem sys = s.system;
    json draw{{"draw", d}};
    if (sys.uncertainty) {
      auto& u = *sys.uncertainty;
      u.Z.clear();
      for (auto& delta : u.delta) {
        delta = SampleAdmissibleDelta(u.J, rng);
        if (!plant::InAdmissibleSet(delta, u.J)) throw NumericalError("sampled delta left the admissible set");
      }
      json deltas = json::array();
      for (const auto& delta : u.delta) deltas.push_back(MatrixJson(delta));
      draw["delta"] = deltas;
    }
    plant::ControllerRealization ctrl = *got.controller;
    if (ctrl.fragility) ctrl.fragility = fracsim::RandomizePhases(*ctrl.fragility, rng);
    try {
      const fracsim::Trajectory traj = fracsim::Simulate(sys, ctrl, s.x0, s.sim);
      const fracsim::ConsensusVerdict v = fracsim::JudgeConsensus(traj);
      const fracsim::ErrorIndices idx = fracsim::ComputeErrorIndices(traj);
      draw["verdict"] = v.passed ? "pass" : "fail";
      draw["final_max_error"] = v.final_max;
      draw["initial_max_error"] = v.initial_max;
      draw["ise_max"] = idx.ise.maxCoeff();
      if (v.passed) ++passed;
      worst_ratio = std::max(worst_ratio, v.final_max / std::max(v.initial_max, 1e-300));
      worst_ise = std::max(worst_ise, idx.ise.maxCoeff());
    } catch (const fracsim::DivergenceError& e) {
      draw["verdict"] = "diverged";
      draw["step"] = e.step();
    }
    Log(LogLevel::kDebug, "draw " + std::to_string(d) + ": " + draw["verdict"].get<std::string>());
    results.push_back(draw);
  }
  report["results"] = results;
  report["passed"] = passed;
  report["pass_rate"] = static_cast<double>(passed) / opts.draws;
  report["worst_final_ratio"] = worst_ratio;
  report["worst_ise"] = worst_ise;
  return Finish(report, kOk, out);
}

}  // namespace commands
}  // namespace fomas
