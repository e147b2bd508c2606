#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace lsos;

namespace {

// X bounded by 2 in absolute value (X^2 <= 4) with mean at least `mean`.
sos::LiftedSdp mean_program(double mean) {
  auto kb = lsos::testing::parse_or_throw("relation X/1 bounded 4; constant a; e(X(a)) - " + std::to_string(mean) +
                                          " >= 0;");
  auto g = ground::ground(kb, ground::UniverseMode::dc());
  sos::CompileOptions co;
  co.degree = 2;
  return sos::compile(g, co);
}

sos::LinearForm moment(const sos::LiftedSdp& sdp, const char* mono) {
  return sdp.linear_form(lsos::testing::poly({{mono, 1}}));
}

}  // namespace

// min E[X^2] subject to E[X] >= 1 is 1 (Jensen, attained by the point mass
// at 1); max E[X] subject to E[X^2] <= 4 is 2 (point mass at 2).
TEST(Solver, MomentProgramsMatchClosedForms) {
  auto sdp = mean_program(1);
  auto lo = sdp::optimize(sdp, moment(sdp, "X(a)^2"), sdp::Direction::minimize);
  ASSERT_EQ(lo.status, sdp::Status::optimal) << lo.reason;
  EXPECT_NEAR(lo.value, 1.0, 1e-5);
  auto hi = sdp::optimize(sdp, moment(sdp, "X(a)"), sdp::Direction::maximize);
  ASSERT_EQ(hi.status, sdp::Status::optimal) << hi.reason;
  EXPECT_NEAR(hi.value, 2.0, 1e-5);
  EXPECT_TRUE(sdp::check_assignment(sdp, hi.x, 1e-6).ok());
}

TEST(Solver, FeasiblePointPassesTheChecker) {
  auto sdp = mean_program(1.5);
  sdp::SolverConfig cfg;
  auto r = sdp::solve_feasibility(sdp, cfg);
  ASSERT_EQ(r.status, sdp::Status::feasible) << r.reason;
  auto rep = sdp::check_assignment(sdp, r.x, cfg.eps);
  EXPECT_TRUE(rep.ok()) << rep.worst;
  EXPECT_GE(sdp.linear_form(lsos::testing::poly({{"X(a)", 1}})).eval(r.x), 1.5 - 1e-6);
}

TEST(Solver, InfeasibleProgramYieldsVerifiedWitness) {
  auto sdp = mean_program(3);  // E[X] <= sqrt(E[X^2]) <= 2 < 3
  auto r = sdp::solve_feasibility(sdp);
  ASSERT_EQ(r.status, sdp::Status::infeasible) << r.reason;
  EXPECT_TRUE(sdp::verify_witness(sdp, r.witness, 1e-5));
  auto agg = sdp::aggregate(sdp, r.witness);
  EXPECT_LT(agg.constant, 0);
  for (const auto& [v, c] : agg.coeffs) EXPECT_LE(std::abs(c), 1e-5);
  for (double s : r.witness.scalars) EXPECT_GE(s, -1e-9);
  ASSERT_EQ(r.witness.blocks.size(), sdp.blocks.size());
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i)
    if (sdp.blocks[i].kind == sos::SymbolicBlock::Kind::psd)
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r.witness.blocks[i]).eigenvalues().minCoeff(), -1e-6);
}

TEST(Solver, TamperedWitnessIsRejected) {
  auto sdp = mean_program(3);
  auto r = sdp::solve_feasibility(sdp);
  ASSERT_EQ(r.status, sdp::Status::infeasible);
  auto w = r.witness;
  ASSERT_FALSE(w.scalars.empty());
  for (auto& s : w.scalars) s *= 2;
  w.scalars[0] += 1;
  EXPECT_FALSE(sdp::verify_witness(sdp, w, 1e-5));
}

TEST(Solver, CheckerFlagsNonPsdMomentMatrix) {
  auto sdp = mean_program(1);
  // E[X] = 1.5 with E[X^2] = 1 violates E[X^2] >= E[X]^2.
  sdp::MomentAssignment x(sdp.variables.size(), 0.0);
  x[*sdp.variable_of(kb::monomial_from_string("X(a)"))] = 1.5;
  x[*sdp.variable_of(kb::monomial_from_string("X(a)^2"))] = 1.0;
  auto rep = sdp::check_assignment(sdp, x, 1e-9);
  EXPECT_FALSE(rep.ok());
  EXPECT_GT(rep.worst, 0.1);
  EXPECT_THROW(sdp::check_assignment(sdp, {}, 1e-9), std::invalid_argument);
}

TEST(Solver, CheckerIsInvariantUnderConstraintScaling) {
  auto small = mean_program(1);
  auto kb = lsos::testing::parse_or_throw("relation X/1 bounded 4; constant a; 1000*e(X(a)) - 1000 >= 0;");
  sos::CompileOptions co;
  auto big = sos::compile(ground::ground(kb, ground::UniverseMode::dc()), co);
  sdp::MomentAssignment x(small.variables.size(), 0.0);
  x[*small.variable_of(kb::monomial_from_string("X(a)"))] = 0.999;
  x[*small.variable_of(kb::monomial_from_string("X(a)^2"))] = 1.0;
  sdp::MomentAssignment y(big.variables.size(), 0.0);
  y[*big.variable_of(kb::monomial_from_string("X(a)"))] = 0.999;
  y[*big.variable_of(kb::monomial_from_string("X(a)^2"))] = 1.0;
  EXPECT_NEAR(sdp::check_assignment(small, x, 1e-9).worst, sdp::check_assignment(big, y, 1e-9).worst, 1e-12);
}

TEST(Solver, RejectsBadObjectives) {
  auto sdp = mean_program(1);
  sos::LinearForm f;
  f.add(99, 1);
  EXPECT_THROW(sdp::optimize(sdp, f, sdp::Direction::minimize), std::invalid_argument);
  sdp::SolverConfig cfg;
  cfg.eps = 0;
  EXPECT_THROW(sdp::optimize(sdp, moment(sdp, "X(a)"), sdp::Direction::minimize, cfg), std::invalid_argument);
}

TEST(Solver, DeterministicForAFixedSeed) {
  auto sdp = mean_program(1);
  sdp::SolverConfig cfg;
  cfg.seed = 42;
  auto a = sdp::optimize(sdp, moment(sdp, "X(a)"), sdp::Direction::maximize, cfg);
  auto b = sdp::optimize(sdp, moment(sdp, "X(a)"), sdp::Direction::maximize, cfg);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.value, b.value);
}
