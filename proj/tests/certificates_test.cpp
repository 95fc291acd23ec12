#include "fomas/certificates.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "fomas/scenario.hpp"
#include "support/stability_oracles.hpp"

namespace fomas {
namespace certificates {
namespace {

using linalg::FromRows;

GTEST_TEST(ArgumentTest, Examples) {
  const ArgumentReport motor = CertifyArgument(FromRows({{0, 1}, {-1282, -124.3}}), 0.87);
  EXPECT_EQ(motor.verdict, Verdict::kStable);
  EXPECT_NEAR(motor.min_arg, M_PI, 1e-12);
  EXPECT_NEAR(motor.margin, M_PI - 0.435 * M_PI, 1e-12);

  const ArgumentReport rot = CertifyArgument(FromRows({{0, 1}, {-1, 0}}), 0.99);
  EXPECT_EQ(rot.verdict, Verdict::kStable);
  EXPECT_NEAR(rot.margin, 0.005 * M_PI, 1e-12);

  EXPECT_EQ(CertifyArgument(Matrix::Zero(2, 2), 0.5).verdict, Verdict::kUndecided);
  EXPECT_EQ(CertifyArgument(Matrix::Identity(2, 2), 0.5).verdict, Verdict::kUnstable);
}

GTEST_TEST(Lemma1Test, Examples) {
  EXPECT_TRUE(CertifyLemma1(-Matrix::Identity(2, 2), 0.5).feasible());
  EXPECT_TRUE(CertifyLemma1(FromRows({{0, 1}, {-1, 0}}), 0.5).feasible());
  EXPECT_EQ(CertifyLemma1(Matrix::Identity(2, 2), 0.5).status, lmi::Status::kInfeasible);
  EXPECT_EQ(CertifyLemma1(Matrix::Identity(3, 3), 0.87).status, lmi::Status::kInfeasible);
  EXPECT_TRUE(CertifyLemma1(FromRows({{0, 1}, {-1282, -124.3}}), 0.87).feasible());
}

GTEST_TEST(Lemma1Test, ProblemShape) {
  const lmi::Problem p = Lemma1Problem(Matrix::Identity(3, 3), 0.5);
  EXPECT_TRUE(p.HasVariable("X11"));
  EXPECT_EQ(p.variable("X12").kind, lmi::VarKind::kSkew);
  EXPECT_EQ(p.MaxConstraintDim(), 6);
}

GTEST_TEST(Lemma1Test, AgreesWithArgumentOracle) {
  int compared = 0, stable = 0;
  for (const auto& c : testing::RandomStabilityCases(50, 2024)) {
    const ArgumentReport arg = CertifyArgument(c.A, c.q);
    if (arg.verdict == Verdict::kUndecided || std::abs(arg.margin) < 1e-6) continue;
    const lmi::FeasibilityResult lemma = CertifyLemma1(c.A, c.q);
    EXPECT_EQ(lemma.feasible(), arg.verdict == Verdict::kStable)
        << "q = " << c.q << ", margin " << arg.margin << ", status " << lmi::StatusName(lemma.status)
        << "\n" << c.A;
    ++compared;
    if (arg.verdict == Verdict::kStable) ++stable;
  }
  EXPECT_GE(compared, 45);
  EXPECT_GT(stable, 5);
  EXPECT_LT(stable, compared - 5);
}

GTEST_TEST(ClosedLoopCertificateTest, PublishedStaticGains) {
  const plant::MultiAgentSystem pmsm = scenario::PmsmSystem();
  const auto bundle = topology::Reduce(topology::Laplacian(pmsm.graph));
  const plant::ClosedLoop cl =
      plant::BuildClosedLoop(pmsm, scenario::PmsmPublishedController(0), bundle);
  const ArgumentReport arg = CertifyArgument(cl.Total(), 0.87);
  EXPECT_EQ(arg.verdict, Verdict::kStable);
  EXPECT_GT(arg.margin, 0.01);
  EXPECT_TRUE(CertifyLemma1(cl.Total(), 0.87).feasible());

  plant::ControllerRealization wild = scenario::PmsmPublishedController(0);
  wild.D_c[0](0, 0) += 1000.0;
  const plant::ClosedLoop bad = plant::BuildClosedLoop(pmsm, wild, bundle);
  EXPECT_EQ(CertifyArgument(bad.Total(), 0.87).verdict, Verdict::kUnstable);
  EXPECT_FALSE(CertifyLemma1(bad.Total(), 0.87).feasible());
}

GTEST_TEST(Theorem1Test, SynthesizedPointMapsBack) {
  // A small Lipschitz constant admits an exactly recoverable solution.
  const plant::MultiAgentSystem sys = scenario::PmsmSystem(0.5);
  synthesis::Options opts;
  opts.n_c = 0;
  const synthesis::SynthesisReport r = synthesis::Synthesize(sys, synthesis::Method::kTheorem2, opts);
  ASSERT_TRUE(r.certified) << r.message;
  ASSERT_TRUE(r.controller.has_value());
  const Theorem1Check check = CheckTheorem1(r.P, *r.controller, sys, r.scalars);
  EXPECT_TRUE(check.holds) << check.max_eigenvalue;
}

GTEST_TEST(Theorem1Test, IdentityWithWildControllerFails) {
  const plant::MultiAgentSystem sys = scenario::PmsmSystem();
  plant::ControllerRealization wild = scenario::PmsmPublishedController(0);
  for (auto& d : wild.D_c) d(0, 0) = 1000.0;
  synthesis::Scalars s;
  s.tau = {1, 1, 1, 1, 1};
  s.mu = 1;
  s.xi = 1.5;
  EXPECT_FALSE(CheckTheorem1(Matrix::Identity(4, 4), wild, sys, s).holds);
  EXPECT_THROW(CheckTheorem1(Matrix::Identity(3, 3), wild, sys, s), DimensionError);
}

}  // namespace
}  // namespace certificates
}  // namespace fomas
