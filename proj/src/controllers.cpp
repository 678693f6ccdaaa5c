#include "ocbf/controllers.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ocbf/linalg.hpp"

namespace ocbf {

FilterResult project_onto_halfspace(const Eigen::VectorXd& u_des, const ConstraintRow& c,
                                    const QpOptions& options) {
  const auto m = u_des.size();
  QpProblem qp{Eigen::MatrixXd::Identity(m, m), -u_des, c.row, Eigen::VectorXd::Constant(1, c.rhs)};
  const QpSolution sol = solve_qp(qp, options);
  FilterResult out;
  out.u_des = u_des;
  out.status = sol.status;
  out.u = sol.u;
  out.slack = c.slack(sol.u);
  return out;
}

FilterResult baseline_filter(const Barrier& barrier, const SystemModel& model,
                             const Eigen::VectorXd& xhat, const Eigen::VectorXd& u_des,
                             double d_bar, const QpOptions& options) {
  return project_onto_halfspace(u_des, trcbf_row(barrier, model, xhat, d_bar), options);
}

FilterResult approach1_filter(const Barrier& barrier, const IssBound& bound,
                              const Observer& observer, double t, const Eigen::VectorXd& xhat,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& u_des,
                              const QpOptions& options) {
  return project_onto_halfspace(u_des, orcbf_row(barrier, bound, observer, xhat, y, t), options);
}

QpProblem approach2_qp(double a, const ChannelBounds& b, const Eigen::VectorXd& u_des) {
  const auto m = u_des.size();
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  qp.H.bottomRightCorner(m, m) *= kAuxRegularization;
  qp.q = Eigen::VectorXd::Zero(2 * m);
  qp.q.head(m) = -u_des;
  qp.A = Eigen::MatrixXd::Zero(2 * m + 1, 2 * m);
  qp.b = Eigen::VectorXd::Zero(2 * m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    qp.A(2 * i, i) = b.b_minus(i);
    qp.A(2 * i, m + i) = -1.0;
    qp.A(2 * i + 1, i) = b.b_plus(i);
    qp.A(2 * i + 1, m + i) = -1.0;
  }
  qp.A.bottomRightCorner(1, m).setOnes();
  qp.b(2 * m) = -a;
  return qp;
}

double approach2_slack(double a, const ChannelBounds& b, const Eigen::VectorXd& u) {
  double total = a;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    total += std::min(b.b_minus(i) * u(i), b.b_plus(i) * u(i));
  }
  return total;
}

Approach2Result approach2_filter(const Barrier& barrier, const SystemModel& model,
                                 const EllipsoidalBound& bound, const Eigen::VectorXd& u_des,
                                 const QpOptions& options) {
  Approach2Result out;
  out.u_des = u_des;
  out.box = box_enclosure(bound);
  out.a = bound_a(barrier, model, out.box);
  out.b = bound_b(barrier, model, out.box);
  const QpSolution sol = solve_qp(approach2_qp(out.a, out.b, u_des), options);
  out.status = sol.status;
  out.u = sol.u.head(u_des.size());
  out.slack = approach2_slack(out.a, out.b, out.u);
  return out;
}

Eigen::VectorXd LqrPolicy::operator()(double, const Eigen::VectorXd& xhat) const {
  return u_eq - K * (xhat - x_ref);
}

LqrPolicy lqr_nominal(const SystemModel& model, const Eigen::VectorXd& x_eq,
                      const Eigen::VectorXd& u_eq, const Eigen::MatrixXd& Q,
                      const Eigen::MatrixXd& R, const Eigen::VectorXd& x_ref) {
  const auto [A, B] = linearize(model, x_eq, u_eq);
  const CareSolution care = solve_care(A, B, Q, R);
  return {care.K, care.P, u_eq, x_ref};
}

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kNominal: return "nominal";
    case ControllerKind::kBaseline: return "baseline";
    case ControllerKind::kApproach1: return "approach1";
    case ControllerKind::kApproach2: return "approach2";
  }
  return "baseline";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "nominal") return ControllerKind::kNominal;
  if (name == "baseline") return ControllerKind::kBaseline;
  if (name == "approach1") return ControllerKind::kApproach1;
  if (name == "approach2") return ControllerKind::kApproach2;
  throw std::invalid_argument("unknown controller kind '" + name + "'");
}

SafetyController::SafetyController(ControllerSettings settings, BarrierPtr barrier, ModelPtr model,
                                   NominalPolicy nominal)
    : settings_(settings),
      barrier_(std::move(barrier)),
      model_(std::move(model)),
      nominal_(std::move(nominal)) {
  qp_options_.max_iterations = settings_.qp_iteration_cap;
}

void SafetyController::check_initial(const Observer& observer) const {
  const Eigen::VectorXd xhat0 = observer.estimate();
  switch (settings_.kind) {
    case ControllerKind::kNominal:
    case ControllerKind::kBaseline:
      return;
    case ControllerKind::kApproach1: {
      const auto iss = observer.iss_bound();
      if (!iss) throw ControllerError("approach1 requires an ISS observer");
      const double margin = barrier_->h(xhat0) - barrier_->gamma_h() * iss->M(0.0);
      if (margin < 0.0) {
        std::ostringstream msg;
        msg << "x̂(0) outside safe-start set: h(x̂₀) − γ_h M(0) = " << margin;
        throw ControllerError(msg.str());
      }
      return;
    }
    case ControllerKind::kApproach2: {
      const EllipsoidalBound e = observer.current_bound(0.0);
      const Box box = box_enclosure(e);
      const auto n = xhat0.size();
      double worst = std::numeric_limits<double>::infinity();
      for (long mask = 0; mask < (1L << n); ++mask) {
        Eigen::VectorXd corner(n);
        for (Eigen::Index i = 0; i < n; ++i) corner(i) = (mask >> i) & 1 ? box.hi(i) : box.lo(i);
        worst = std::min(worst, barrier_->h(corner));
      }
      std::mt19937_64 rng(settings_.initial_check_seed);
      std::normal_distribution<double> normal;
      Eigen::VectorXd dir(n);
      for (int s = 0; s < settings_.initial_check_samples; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) dir(i) = normal(rng);
        worst = std::min(worst, barrier_->h(e.boundary_point(dir)));
      }
      if (worst < 0.0) {
        std::ostringstream msg;
        msg << "x̂(0) outside safe-start set: min h over 𝒫(0, x̂₀) samples = " << worst;
        throw ControllerError(msg.str());
      }
      // The channel sign condition must hold from the start.
      try {
        (void)bound_b(*barrier_, *model_, box);
      } catch (const AssumptionViolation& e2) {
        throw ControllerError(e2.what());
      }
      return;
    }
  }
}

FilterResult SafetyController::operator()(double t, const Observer& observer,
                                          const Eigen::VectorXd& y) const {
  return evaluate_at(t, observer, observer.estimate(), y);
}

FilterResult SafetyController::evaluate_at(double t, const Observer& observer,
                                           const Eigen::VectorXd& xhat,
                                           const Eigen::VectorXd& y) const {
  const Eigen::VectorXd u_des = nominal_(t, xhat);
  switch (settings_.kind) {
    case ControllerKind::kNominal: {
      FilterResult out;
      out.u = out.u_des = u_des;
      out.slack = trcbf_row(*barrier_, *model_, xhat, settings_.baseline_d_bar).slack(u_des);
      return out;
    }
    case ControllerKind::kBaseline:
      return baseline_filter(*barrier_, *model_, xhat, u_des, settings_.baseline_d_bar, qp_options_);
    case ControllerKind::kApproach1: {
      const auto iss = observer.iss_bound();
      if (!iss) throw ControllerError("approach1 requires an ISS observer");
      return approach1_filter(*barrier_, *iss, observer, t, xhat, y, u_des, qp_options_);
    }
    case ControllerKind::kApproach2: {
      EllipsoidalBound bound = observer.current_bound(t);
      bound.center = xhat;
      return approach2_filter(*barrier_, *model_, bound, u_des, qp_options_);
    }
  }
  throw ControllerError("unknown controller kind");
}

}  // namespace ocbf
