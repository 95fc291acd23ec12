// Acceptance harness: runs every criterion and prints one PASS/FAIL line per
// criterion with its measurements and wall time.
//
// Exit status: the number of failed criteria. With --require-complete the
// harness exits 0 as long as every criterion ran to a verdict, so ctest
// tracks crashes and exceptions while the verdict lines carry the results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fomas/certificates.hpp"
#include "fomas/commands.hpp"
#include "fomas/fracsim.hpp"
#include "fomas/scenario.hpp"
#include "fomas/synthesis.hpp"
#include "support/lmi_oracles.hpp"
#include "support/stability_oracles.hpp"

namespace fomas {
namespace {

using Clock = std::chrono::steady_clock;

// Criteria whose time limit applies per solve rather than to the whole run.
constexpr double kNoBudget = std::numeric_limits<double>::infinity();

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

struct CertificateChain {
  bool passed = false;
  double arg_margin = 0.0;
  lmi::Status lemma = lmi::Status::kSolverFailure;
};

CertificateChain Certify(const plant::MultiAgentSystem& sys, const plant::ControllerRealization& c) {
  const auto bundle = topology::Reduce(topology::Laplacian(sys.graph));
  const Matrix A = plant::BuildClosedLoop(sys, c, bundle).Total();
  const double q = sys.dynamics.q;
  const auto arg = certificates::CertifyArgument(A, q);
  const auto lemma = certificates::CertifyLemma1(A, q);
  CertificateChain out;
  out.arg_margin = arg.margin;
  out.lemma = lemma.status;
  out.passed = arg.verdict == certificates::Verdict::kStable && arg.margin > 0.01 && lemma.feasible();
  return out;
}

// Controllers synthesized for criterion 2 and simulated in criterion 4.
struct SynthesisCase {
  std::string label;
  plant::MultiAgentSystem system;
  synthesis::Method method;
  int n_c;
  Vector x0;
  std::optional<plant::ControllerRealization> controller;
};

std::vector<SynthesisCase>& Cases() {
  static std::vector<SynthesisCase> cases = [] {
    std::vector<SynthesisCase> c;
    for (int n_c : {0, 1}) {
      c.push_back({"pmsm/theorem2/n_c=" + std::to_string(n_c), scenario::PmsmSystem(),
                   synthesis::Method::kTheorem2, n_c, scenario::PmsmInitialState(), std::nullopt});
    }
    for (int n_c : {1, 2}) {
      c.push_back({"numeric/corollary1/n_c=" + std::to_string(n_c), scenario::NumericSystem(),
                   synthesis::Method::kCorollary1, n_c, scenario::NumericInitialState(), std::nullopt});
    }
    return c;
  }();
  return cases;
}

Outcome PublishedCertificate() {
  const plant::MultiAgentSystem sys = scenario::PmsmSystem();
  const CertificateChain c = Certify(sys, scenario::PmsmPublishedController(0));
  return {c.passed, "min |arg λ| - 0.87π/2 = " + Fmt("%.4f", c.arg_margin) + " rad, lemma 1 " +
                        lmi::StatusName(c.lemma)};
}

Outcome SynthesisFeasibility() {
  Outcome out{true, ""};
  for (auto& sc : Cases()) {
    synthesis::Options o;
    o.n_c = sc.n_c;
    const auto start = Clock::now();
    const synthesis::SynthesisReport r = synthesis::Synthesize(sc.system, sc.method, o);
    bool ok = r.status == lmi::Status::kStrictlyFeasible && r.controller.has_value();
    std::string chain = "no controller";
    double certify_seconds = 0.0;
    if (r.controller) {
      const auto certify_start = Clock::now();
      const CertificateChain c = Certify(sc.system, *r.controller);
      certify_seconds = Seconds(certify_start);
      ok = ok && c.passed;
      chain = "arg margin " + Fmt("%.3f", c.arg_margin) + ", lemma 1 " + lmi::StatusName(c.lemma) +
              " (" + Fmt("%.1f s", certify_seconds) + ")";
      sc.controller = r.controller;
    }
    const double total = Seconds(start);
    ok = ok && r.solve_seconds < 60.0 && certify_seconds < 60.0;
    out.passed = out.passed && ok;
    out.detail += (out.detail.empty() ? "" : "; ") + sc.label + ": " + lmi::StatusName(r.status) +
                  " (stage " + r.stage + (r.certified ? ", certified" : ", uncertified") + ", " +
                  Fmt("%.1f s", r.solve_seconds) + "), " + chain + ", case " + Fmt("%.1f s", total);
  }
  return out;
}

Outcome SimulationOracle() {
  const auto max_error = [](double dt) {
    fracsim::SimConfig cfg;
    cfg.t_end = 5.0;
    cfg.dt = dt;
    const std::vector<double> x = fracsim::SimulateScalar(-5.0, 0.87, 1.0, cfg);
    double worst = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
      const double t = k * dt;
      if (t < 0.1 - 1e-12) continue;
      const double exact = fracsim::MittagLeffler(0.87, -5.0 * std::pow(t, 0.87));
      worst = std::max(worst, std::abs(x[k] - exact) / std::abs(exact));
    }
    return worst;
  };
  const double coarse = max_error(1e-3), fine = max_error(5e-4);
  return {coarse < 0.01 && coarse / fine >= 1.8,
          "max rel. error " + Fmt("%.5f", coarse) + " at dt=1e-3, " + Fmt("%.5f", fine) +
              " at dt=5e-4, ratio " + Fmt("%.2f", coarse / fine)};
}

Outcome EndToEndConsensus() {
  Outcome out{true, ""};
  for (const auto& sc : Cases()) {
    std::string line = sc.label + ": ";
    if (!sc.controller) {
      out.passed = false;
      out.detail += (out.detail.empty() ? "" : "; ") + line + "no controller";
      continue;
    }
    try {
      const fracsim::Trajectory t = fracsim::Simulate(sc.system, *sc.controller, sc.x0, fracsim::SimConfig{});
      const fracsim::ConsensusVerdict v = fracsim::JudgeConsensus(t, 0.01, 0.0);
      const fracsim::ErrorIndices idx = fracsim::ComputeErrorIndices(t);
      const bool finite =
          idx.ise.allFinite() && idx.iae.allFinite() && idx.itse.allFinite() && idx.itae.allFinite();
      out.passed = out.passed && v.passed && finite;
      line += "e(T)/e(0) = " + Fmt("%.4f", v.final_max / v.initial_max) +
              (finite ? ", indices finite" : ", indices NOT finite");
    } catch (const fracsim::DivergenceError& e) {
      out.passed = false;
      line += std::string("diverged: ") + e.what();
    }
    out.detail += (out.detail.empty() ? "" : "; ") + line;
  }
  return out;
}

Outcome SolverOracles() {
  int agreed = 0, total = 0;
  std::string misses;
  for (const auto& o : testing::AnalyticLmiProblems()) {
    ++total;
    const lmi::FeasibilityResult r = lmi::Solve(o.problem, testing::OracleSolverOptions());
    const bool ok = r.feasible() == o.feasible && std::abs(r.margin - o.optimal_margin) <= 1e-6;
    if (ok) {
      ++agreed;
    } else {
      misses += " " + o.name;
    }
  }
  int lemma_agree = 0, compared = 0;
  for (const auto& c : testing::RandomStabilityCases(50, 2024)) {
    const auto arg = certificates::CertifyArgument(c.A, c.q);
    if (arg.verdict == certificates::Verdict::kUndecided || std::abs(arg.margin) < 1e-6) continue;
    ++compared;
    if (certificates::CertifyLemma1(c.A, c.q).feasible() == (arg.verdict == certificates::Verdict::kStable)) {
      ++lemma_agree;
    }
  }
  const bool passed = total >= 10 && agreed == total && lemma_agree == compared;
  return {passed, std::to_string(agreed) + "/" + std::to_string(total) + " analytic problems" +
                      (misses.empty() ? "" : " (missed:" + misses + ")") + ", lemma 1 vs argument " +
                      std::to_string(lemma_agree) + "/" + std::to_string(compared)};
}

Outcome StructuralSuite() {
  std::vector<std::string> failures;
  const auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  std::mt19937 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  const auto random = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    }
    return m;
  };
  const auto random_graph = [&](int N) {
    Matrix a = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) a(i, (i + 1) % N) = 0.5 + w(rng);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (i != j && w(rng) < 0.3) a(i, j) = w(rng);
      }
    }
    return a;
  };

  std::vector<Matrix> laplacians = {topology::Laplacian(scenario::PmsmSystem().graph),
                                    topology::Laplacian(scenario::NumericSystem().graph)};
  for (const Matrix& L : laplacians) {
    const int N = static_cast<int>(L.rows());
    check((L * linalg::Ones(N)).cwiseAbs().maxCoeff() <= 1e-12, "row sums");
    Matrix expected(N, N - 1);
    expected << Matrix::Identity(N - 1, N - 1), -linalg::Ones(N - 1).transpose();
    check((topology::Reduce(L).Gamma() - expected).cwiseAbs().maxCoeff() <= 1e-10, "L L̂† structure");
  }
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 2 + trial % 4, n = 1 + trial % 3, p = 1 + (trial / 3) % 3;
    const Matrix L = topology::Laplacian(topology::DirectedGraph(random_graph(N)));
    check((L * linalg::Ones(N)).cwiseAbs().maxCoeff() <= 1e-12, "random row sums");
    const Matrix C = random(p, n), A = random(n, n);
    const Matrix C_N = linalg::Kron(Matrix::Identity(N, N), C);
    const Matrix A_N = linalg::Kron(Matrix::Identity(N, N), A);
    check((topology::Lift(L, p) * C_N - C_N * topology::Lift(L, n)).cwiseAbs().maxCoeff() <= 1e-12,
          "output commutation");
    check((topology::Lift(L, n) * A_N - A_N * topology::Lift(L, n)).cwiseAbs().maxCoeff() <= 1e-12,
          "state commutation");

    const Matrix K1 = random(2, 3), K2 = random(3, 2), K3 = random(3, 2), K4 = random(2, 3);
    check((linalg::Kron(K1, K2) * linalg::Kron(K3, K4) - linalg::Kron(K1 * K3, K2 * K4))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12,
          "mixed product");

    const int k = 1 + trial % 3;
    const Matrix Gz = random(k, k), Kz = random(k, k), Gj = random(k, k), Kj = random(k, k);
    const Matrix Z = Gz * Gz.transpose() + (Kz - Kz.transpose());
    const Matrix J = Gj * Gj.transpose() + 0.1 * Matrix::Identity(k, k) + (Kj - Kj.transpose());
    check(plant::InAdmissibleSet(plant::DeltaOf(Z, J), J), "delta membership");
  }

  plant::MultiAgentSystem pmsm = scenario::PmsmSystem();
  for (auto& d : pmsm.uncertainty->delta) d = pmsm.uncertainty->delta.front();
  Vector x0(6);
  x0 << 0.01, -0.004, 0.01, -0.004, 0.01, -0.004;
  fracsim::SimConfig cfg;
  cfg.t_end = 2.0;
  const fracsim::Trajectory t = fracsim::Simulate(pmsm, scenario::PmsmPublishedController(1), x0, cfg);
  check(t.e.cwiseAbs().maxCoeff() < 1e-12, "consensus subspace invariance");

  std::string detail = failures.empty() ? "all identities hold" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

Outcome RobustnessSweep() {
  commands::CommandOptions o;
  o.write_files = false;
  o.draws = 20;
  o.seed = 1;
  const commands::RunReport r = commands::CmdSweep(scenario::Load("pmsm"), o);
  if (r.exit_code != commands::kOk) return {false, "sweep exited with code " + std::to_string(r.exit_code)};
  const int passed = r.report["passed"].get<int>();
  return {passed == 20, std::to_string(passed) + "/20 draws reach consensus, worst e(T)/e(0) " +
                            Fmt("%.4f", r.report["worst_final_ratio"].get<double>())};
}

}  // namespace
}  // namespace fomas

int main(int argc, char** argv) {
  using namespace fomas;
  CLI::App app{"Acceptance criteria for the fomas library"};
  bool require_complete = false;
  app.add_flag("--require-complete", require_complete,
               "Exit 0 when every criterion reached a verdict, even a failing one");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "published static gains certificate", 5.0, PublishedCertificate},
      {2, "synthesis feasibility and certificates", kNoBudget, SynthesisFeasibility},
      {3, "simulation vs Mittag-Leffler oracle", 10.0, SimulationOracle},
      {4, "end-to-end consensus within 1% at T = 5 s", kNoBudget, EndToEndConsensus},
      {5, "LMI solver oracle suite", 30.0, SolverOracles},
      {6, "structural property suite", 10.0, StructuralSuite},
      {7, "robustness sweep, 20 draws", 120.0, RobustnessSweep},
  };
  int failed = 0, incomplete = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
      ++incomplete;
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (seconds >= c.budget_seconds) {
      out.passed = false;
      out.detail += "; over the " + Fmt("%.0f s", c.budget_seconds) + " budget";
    }
    if (!out.passed) ++failed;
    std::printf("%s criterion %d: %s | %s | %.2f s\n", out.passed ? "PASS" : "FAIL", c.id,
                c.title.c_str(), out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (require_complete) return incomplete == 0 ? 0 : 1;
  return failed;
}
