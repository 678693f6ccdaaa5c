#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "ocbf/controllers.hpp"
#include "support/qp_oracle.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd v1(double a) { return VectorXd::Constant(1, a); }
VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

}  // namespace

TEST(Projection, InactiveConstraintKeepsDesiredInput) {
  const ocbf::ConstraintRow c{(Eigen::RowVectorXd(2) << 1, 1).finished(), 1.0};
  const auto r = ocbf::project_onto_halfspace(v2(2, 3), c);
  EXPECT_EQ(r.status, ocbf::QpStatus::kOptimal);
  EXPECT_TRUE(r.u.isApprox(v2(2, 3)));
  EXPECT_NEAR(r.slack, 4.0, 1e-12);
}

TEST(Projection, ActiveConstraintClosedForm) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  for (int k = 0; k < 100; ++k) {
    const Eigen::RowVectorXd row = Eigen::RowVectorXd::NullaryExpr(3, [&] { return N(rng); });
    const VectorXd u_des = VectorXd::NullaryExpr(3, [&] { return N(rng); });
    const double rhs = row.dot(u_des) + std::abs(N(rng)) + 0.1;
    const auto r = ocbf::project_onto_halfspace(u_des, {row, rhs});
    const VectorXd expected = u_des + (rhs - row.dot(u_des)) / row.squaredNorm() * row.transpose();
    EXPECT_LT((r.u - expected).norm(), 1e-9);
    EXPECT_NEAR(r.slack, 0.0, 1e-9);
  }
}

TEST(Baseline, DoubleIntegratorCap) {
  // L_g h = −1 so the filter is u = min(u_des, L_f h + α(h)).
  const auto di = ocbf::double_integrator();
  const ocbf::HalfspaceBarrier b(1.0, 2.0, {ocbf::ClassK::Kind::kLinear, 2.0});
  const VectorXd xhat = v2(1.5, 0.8);
  const double cap = -1.0 * 0.8 + 2.0 * b.h(xhat);
  EXPECT_NEAR(ocbf::baseline_filter(b, *di, xhat, v1(5.0)).u(0), cap, 1e-12);
  EXPECT_NEAR(ocbf::baseline_filter(b, *di, xhat, v1(cap - 1.0)).u(0), cap - 1.0, 1e-12);
  // A robust baseline subtracts ‖L_{g_d}h‖d̄ from the cap.
  EXPECT_NEAR(ocbf::baseline_filter(b, *di, xhat, v1(5.0), 0.3).u(0), cap - 0.3, 1e-12);
}

TEST(Approach1, ZeroErrorBoundReducesToBaseline) {
  const auto di = ocbf::double_integrator();
  const ocbf::HalfspaceBarrier b(1.0, 2.0);
  const ocbf::LuenbergerObserver obs(di, 0.5, 0.5, v2(0.4, 0.3));
  const ocbf::IssBound zero{};
  const VectorXd xhat = obs.estimate();
  const VectorXd y = di->C() * xhat;  // no innovation: p(x̂, y) = f(x̂)
  for (double u_des : {-2.0, 0.0, 1.0, 4.0}) {
    const auto a1 = ocbf::approach1_filter(b, zero, obs, 0.3, xhat, y, v1(u_des));
    const auto base = ocbf::baseline_filter(b, *di, xhat, v1(u_des));
    EXPECT_NEAR(a1.u(0), base.u(0), 1e-12);
  }
}

TEST(Approach1, ConstraintLoosensAsBoundDecays) {
  const auto di = ocbf::double_integrator();
  const ocbf::HalfspaceBarrier b(1.0, 2.0);
  const ocbf::LuenbergerObserver obs(di, 0.5, 0.5, VectorXd::Zero(2));
  const auto iss = *obs.iss_bound();
  const VectorXd xhat = v2(0.5, 0.2), y = v1(0.5);
  const auto r0 = ocbf::orcbf_row(b, iss, obs, xhat, y, 0.0);
  const auto r1 = ocbf::orcbf_row(b, iss, obs, xhat, y, 1.0);
  EXPECT_LT(r1.rhs, r0.rhs);
  EXPECT_TRUE(r1.row.isApprox(r0.row));
}

TEST(Approach2, QpLayout) {
  const ocbf::ChannelBounds cb{v2(1.0, -3.0), v2(2.0, -1.0)};
  const auto qp = ocbf::approach2_qp(0.5, cb, v2(0.1, 0.2));
  ASSERT_EQ(qp.H.rows(), 4);
  ASSERT_EQ(qp.A.rows(), 5);
  EXPECT_EQ(qp.H(2, 2), ocbf::kAuxRegularization);
  EXPECT_TRUE(qp.q.isApprox((VectorXd(4) << -0.1, -0.2, 0, 0).finished()));
  // b⁻ rows first per channel, then b⁺, then Σk ≥ −a.
  EXPECT_TRUE(qp.A.row(0).isApprox((Eigen::RowVectorXd(4) << 1, 0, -1, 0).finished()));
  EXPECT_TRUE(qp.A.row(1).isApprox((Eigen::RowVectorXd(4) << 2, 0, -1, 0).finished()));
  EXPECT_TRUE(qp.A.row(2).isApprox((Eigen::RowVectorXd(4) << 0, -3, 0, -1).finished()));
  EXPECT_TRUE(qp.A.row(3).isApprox((Eigen::RowVectorXd(4) << 0, -1, 0, -1).finished()));
  EXPECT_TRUE(qp.A.row(4).isApprox((Eigen::RowVectorXd(4) << 0, 0, 1, 1).finished()));
  EXPECT_DOUBLE_EQ(qp.b(4), -0.5);
  EXPECT_NO_THROW(ocbf::validate(qp));
}

TEST(Approach2, QpMatchesEnumerationOracle) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  std::bernoulli_distribution coin;
  for (int k = 0; k < 200; ++k) {
    ocbf::ChannelBounds cb{VectorXd(2), VectorXd(2)};
    for (int i = 0; i < 2; ++i) {
      const double lo = mag(rng), hi = lo + mag(rng);
      const bool positive = coin(rng);
      cb.b_minus(i) = positive ? lo : -hi;
      cb.b_plus(i) = positive ? hi : -lo;
    }
    const double a = N(rng);
    const VectorXd u_des = 2.0 * v2(N(rng), N(rng));
    const auto qp = ocbf::approach2_qp(a, cb, u_des);
    const auto sol = ocbf::solve_qp(qp);
    const auto ref = ocbf::oracle::enumerate_active_sets(qp);
    ASSERT_TRUE(sol.optimal());
    ASSERT_TRUE(ref.has_value());
    EXPECT_LT((sol.u.head(2) - ref->head(2)).norm(), 1e-6);
    EXPECT_GE(ocbf::approach2_slack(a, cb, sol.u.head(2)), -1e-8);
  }
}

TEST(Approach2, DoubleIntegratorFilter) {
  const auto di = ocbf::double_integrator();
  const ocbf::HalfspaceBarrier b(1.0, 2.0);
  const ocbf::EllipsoidalBound e{MatrixXd::Identity(2, 2), 0.04, v2(0.5, 0.2)};
  // b⁻ = b⁺ = −1, so the constraint is u ≤ a.
  const auto r = ocbf::approach2_filter(b, *di, e, v1(10.0));
  EXPECT_EQ(r.b.b_minus(0), -1.0);
  EXPECT_NEAR(r.u(0), r.a, 1e-6);
  EXPECT_NEAR(r.slack, 0.0, 1e-6);
  // Worst corner (0.7, 0.4): −0.4 + (−0.4 + 1.3).
  EXPECT_NEAR(r.a, 0.5, 1e-12);
  const auto free = ocbf::approach2_filter(b, *di, e, v1(-1.0));
  EXPECT_NEAR(free.u(0), -1.0, 1e-9);
}

TEST(Lqr, DoubleIntegratorGain) {
  const auto di = ocbf::double_integrator();
  const auto pol = ocbf::lqr_nominal(*di, VectorXd::Zero(2), VectorXd::Zero(1),
                                     MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), v2(3, 0));
  EXPECT_NEAR(pol.K(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(pol.K(0, 1), std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(pol(0.0, v2(1, 0.5))(0), 2.0 - std::sqrt(3.0) * 0.5, 1e-9);
}

TEST(SafetyController, InitialChecks) {
  const auto di = ocbf::double_integrator();
  const auto b = std::make_shared<ocbf::HalfspaceBarrier>(1.0, 2.0);
  const ocbf::NominalPolicy zero = [](double, const VectorXd&) { return v1(0.0); };
  const ocbf::LuenbergerObserver near_wall(di, 0.5, 0.5, v2(1.9, 0.0));
  const ocbf::LuenbergerObserver far(di, 0.5, 0.5, v2(0.0, 0.0));
  for (const auto kind : {ocbf::ControllerKind::kApproach1, ocbf::ControllerKind::kApproach2}) {
    ocbf::ControllerSettings s;
    s.kind = kind;
    const ocbf::SafetyController ctl(s, b, di, zero);
    EXPECT_NO_THROW(ctl.check_initial(far));
    try {
      ctl.check_initial(near_wall);
      FAIL() << "expected ControllerError";
    } catch (const ocbf::ControllerError& e) {
      EXPECT_NE(std::string(e.what()).find("outside safe-start set"), std::string::npos);
    }
  }
  ocbf::ControllerSettings s;
  s.kind = ocbf::ControllerKind::kBaseline;
  EXPECT_NO_THROW(ocbf::SafetyController(s, b, di, zero).check_initial(near_wall));
}

TEST(SafetyController, DispatchAndProbes) {
  const auto di = ocbf::double_integrator();
  const auto b = std::make_shared<ocbf::HalfspaceBarrier>(1.0, 2.0);
  const ocbf::NominalPolicy push = [](double, const VectorXd&) { return v1(3.0); };
  const ocbf::LuenbergerObserver obs(di, 0.5, 0.5, v2(1.0, 0.5));
  const VectorXd y = v1(1.0);
  for (const auto kind : {ocbf::ControllerKind::kNominal, ocbf::ControllerKind::kBaseline,
                          ocbf::ControllerKind::kApproach1, ocbf::ControllerKind::kApproach2}) {
    ocbf::ControllerSettings s;
    s.kind = kind;
    const ocbf::SafetyController ctl(s, b, di, push);
    const auto r = ctl(0.0, obs, y);
    EXPECT_EQ(r.u_des(0), 3.0);
    if (kind == ocbf::ControllerKind::kNominal) {
      EXPECT_EQ(r.u(0), 3.0);
    } else {
      EXPECT_LT(r.u(0), 3.0) << ocbf::to_string(kind);
      EXPECT_GE(r.slack, -1e-9);
    }
    // Moving the estimate toward the wall tightens the state-only filters
    // (approach 1 also sees the innovation y − Cx̂, which pulls the other way).
    if (kind == ocbf::ControllerKind::kBaseline || kind == ocbf::ControllerKind::kApproach2)
      EXPECT_LE(ctl.evaluate_at(0.0, obs, v2(1.2, 0.5), y).u(0), r.u(0) + 1e-12);
  }
  EXPECT_EQ(ocbf::controller_kind_from_string("approach2"), ocbf::ControllerKind::kApproach2);
  EXPECT_THROW((void)ocbf::controller_kind_from_string("mpc"), std::invalid_argument);
}
