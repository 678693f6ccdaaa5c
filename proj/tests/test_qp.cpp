#include <random>

#include <gtest/gtest.h>

#include "ocbf/qp.hpp"
#include "support/qp_oracle.hpp"

using namespace ocbf;

namespace {

QpProblem projection(const Eigen::VectorXd& target, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const auto n = target.size();
  return {Eigen::MatrixXd::Identity(n, n), -target, A, b};
}

}  // namespace

TEST(Qp, HalfspaceProjection) {
  // minimize ‖u − (1,1)‖² s.t. u₁ + u₂ ≥ 3
  const auto sol = solve_qp(projection(Eigen::Vector2d(1, 1), Eigen::RowVector2d(1, 1), Eigen::VectorXd::Constant(1, 3.0)));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.u(0), 1.5, 1e-12);
  EXPECT_NEAR(sol.u(1), 1.5, 1e-12);
  ASSERT_EQ(sol.active_set.size(), 1u);
  EXPECT_NEAR(sol.multipliers(0), 0.5, 1e-12);
}

TEST(Qp, InactiveConstraintReturnsUnconstrainedMinimizer) {
  const auto sol = solve_qp(projection(Eigen::Vector2d(1, 1), Eigen::RowVector2d(1, 1), Eigen::VectorXd::Constant(1, 0.0)));
  ASSERT_TRUE(sol.optimal());
  EXPECT_TRUE(sol.u.isApprox(Eigen::Vector2d(1, 1)));
  EXPECT_TRUE(sol.active_set.empty());
  EXPECT_EQ(sol.multipliers(0), 0.0);
}

TEST(Qp, NoConstraints) {
  QpProblem p{Eigen::Matrix2d{{2, 0}, {0, 4}}, Eigen::Vector2d(-2, -4), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
  const auto sol = solve_qp(p);
  ASSERT_TRUE(sol.optimal());
  EXPECT_TRUE(sol.u.isApprox(Eigen::Vector2d(1, 1)));
}

TEST(Qp, ContradictoryConstraintsAreInfeasible) {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  const auto sol = solve_qp(projection(Eigen::VectorXd::Zero(1), A, Eigen::Vector2d(1, 0)));
  EXPECT_EQ(sol.status, QpStatus::kInfeasible);
}

TEST(Qp, DuplicateConstraintsDoNotBreakFactorization) {
  Eigen::MatrixXd A(3, 2);
  A << 1, 1, 1, 1, 2, 2;
  const auto sol = solve_qp(projection(Eigen::Vector2d(0, 0), A, Eigen::Vector3d(1, 1, 2)));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.u(0), 0.5, 1e-12);
  EXPECT_NEAR(sol.u(1), 0.5, 1e-12);
}

TEST(Qp, IterationCapReported) {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  QpOptions opts;
  opts.max_iterations = 1;
  const auto sol = solve_qp(projection(Eigen::Vector2d(0, 0), A, Eigen::Vector2d(1, 1)), opts);
  EXPECT_EQ(sol.status, QpStatus::kMaxIterations);
}

TEST(Qp, ValidateRejectsBadShapes) {
  QpProblem p{Eigen::Matrix2d::Identity(), Eigen::Vector3d::Zero(), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.q = Eigen::Vector2d::Zero();
  p.H(0, 0) = -1;
  EXPECT_THROW(validate(p), std::invalid_argument);
  EXPECT_THROW((void)solve_qp(p), std::invalid_argument);
}

TEST(Qp, MatchesEnumerationOracle) {
  std::mt19937_64 rng(11);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const QpProblem p = oracle::random_qp(rng);
    const auto sol = solve_qp(p);
    const auto ref = oracle::enumerate_active_sets(p);
    if (!ref) {
      EXPECT_EQ(sol.status, QpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_TRUE(sol.optimal()) << "trial " << trial;
    EXPECT_LE((sol.u - *ref).norm(), 1e-6) << "trial " << trial;
    EXPECT_LE(kkt_stationarity(p, sol.u, sol.multipliers), 1e-8);
    if (sol.multipliers.size() > 0) EXPECT_GE(sol.multipliers.minCoeff(), -1e-12);
  }
  EXPECT_GT(feasible, 100);
}
