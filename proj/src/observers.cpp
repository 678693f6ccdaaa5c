#include "ocbf/observers.hpp"

#include <cmath>
#include <sstream>

#include "ocbf/linalg.hpp"

namespace ocbf {

double EllipsoidalBound::quadratic_form(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd e = x - center;
  return e.dot(shape.llt().solve(e));
}

bool EllipsoidalBound::contains(const Eigen::VectorXd& x, double rel_tol) const {
  return quadratic_form(x) <= level * (1.0 + rel_tol) + 1e-15;
}

Eigen::VectorXd EllipsoidalBound::boundary_point(const Eigen::VectorXd& dir) const {
  // x = c + √level · shape^½ · dir/‖dir‖ satisfies the quadratic form with equality.
  const Eigen::MatrixXd L = shape.llt().matrixL();
  return center + std::sqrt(level) * (L * dir.normalized());
}

EllipsoidalBound as_ellipsoid(const IssBound& bound, double t, const Eigen::VectorXd& center) {
  const double M = bound.M(t);
  return {Eigen::MatrixXd::Identity(center.size(), center.size()), M * M, center};
}

// --- Observer ---------------------------------------------------------------

Observer::Observer(int n, Eigen::VectorXd initial_state) : n_(n), state_(std::move(initial_state)) {}

void Observer::set_state(Eigen::VectorXd state) {
  if (state.size() != state_.size()) throw std::invalid_argument("observer: state size mismatch");
  state_ = std::move(state);
}

void Observer::step(const Eigen::VectorXd& y, const Eigen::VectorXd& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("observer step: dt must be positive");
  const Eigen::VectorXd& s = state_;
  const Eigen::VectorXd k1 = derivative(s, y, u);
  const Eigen::VectorXd k2 = derivative(s + 0.5 * dt * k1, y, u);
  const Eigen::VectorXd k3 = derivative(s + 0.5 * dt * k2, y, u);
  const Eigen::VectorXd k4 = derivative(s + dt * k3, y, u);
  set_state(s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  validate();
}

// --- Luenberger -------------------------------------------------------------

LuenbergerObserver::LuenbergerObserver(std::shared_ptr<const LinearSystem> model, double theta,
                                       double delta, const Eigen::VectorXd& xhat0)
    : Observer(model->dims().n, xhat0),
      model_(std::move(model)),
      theta_(theta),
      delta_(delta),
      xhat0_(xhat0) {
  if (!(delta >= 0.0)) throw std::invalid_argument("luenberger: delta must be non-negative");
  if (xhat0.size() != model_->dims().n) throw std::invalid_argument("luenberger: x̂₀ size mismatch");
  P_ = solve_observer_lyapunov(model_->A(), model_->C(), theta_);
  P_inv_ = symmetrize(P_.inverse());
  gain_ = 0.5 * P_inv_ * model_->C().transpose();
  L_ = gain_.col(0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P_);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  sqrt_lmax_ = std::sqrt(lmax);

  const Eigen::MatrixXd P_half = es.operatorSqrt();
  const double k = (P_half * model_->g_d(xhat0)).operatorNorm() * model_->d_bar() +
                   (P_half * gain_ * model_->c_d(xhat0)).operatorNorm() * model_->v_bar();
  eta_ = k / theta_;

  iss_.delta = delta_;
  iss_.rate = theta_;
  iss_.transient = std::max(sqrt_lmax_ * delta_ - eta_, 0.0) / std::sqrt(lmin);
  iss_.floor = eta_ / std::sqrt(lmin);
}

double LuenbergerObserver::level(double t) const {
  const double s = std::max(sqrt_lmax_ * delta_ - eta_, 0.0) * std::exp(-theta_ * t) + eta_;
  return s * s;
}

Eigen::VectorXd LuenbergerObserver::derivative(const Eigen::VectorXd& state,
                                               const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& u) const {
  return p(state, y) + q(state, y) * u;
}

Eigen::VectorXd LuenbergerObserver::p(const Eigen::VectorXd& xhat, const Eigen::VectorXd& y) const {
  return model_->A() * xhat + gain_ * (y - model_->C() * xhat);
}

Eigen::MatrixXd LuenbergerObserver::q(const Eigen::VectorXd&, const Eigen::VectorXd&) const {
  return model_->B();
}

EllipsoidalBound LuenbergerObserver::current_bound(double t) const {
  return {P_inv_, level(t), estimate()};
}

bool LuenbergerObserver::initial_set_contains(const Eigen::VectorXd& x0) const {
  return (x0 - xhat0_).norm() <= delta_ * (1.0 + 1e-12);
}

std::unique_ptr<Observer> LuenbergerObserver::clone() const {
  return std::make_unique<LuenbergerObserver>(*this);
}

// --- DEKF -------------------------------------------------------------------

namespace {

Eigen::VectorXd pack_dekf(const Eigen::VectorXd& xhat, const Eigen::MatrixXd& P, double V) {
  const auto n = xhat.size();
  Eigen::VectorXd s(n + n * n + 1);
  s.head(n) = xhat;
  s.segment(n, n * n) = P.reshaped();
  s(n + n * n) = V;
  return s;
}

// ‖M P^{−½}‖₂ = √λmax(M P⁻¹ Mᵀ)
double weighted_norm(const Eigen::MatrixXd& M, const Eigen::LLT<Eigen::MatrixXd>& P_llt) {
  if (M.size() == 0) return 0.0;
  const Eigen::MatrixXd W = P_llt.matrixL().solve(M.transpose());  // L⁻¹Mᵀ
  const Eigen::MatrixXd G = W.transpose() * W;                       // M P⁻¹ Mᵀ
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace

DekfObserver::DekfObserver(ModelPtr model, DekfConfig config, const Eigen::VectorXd& xhat0)
    : Observer(model->dims().n, pack_dekf(xhat0, config.P0, config.V0)),
      model_(std::move(model)),
      config_(std::move(config)) {
  const auto& dims = model_->dims();
  if (config_.Q.rows() != dims.n || config_.Q.cols() != dims.n || config_.R.rows() != dims.ny ||
      config_.R.cols() != dims.ny || config_.P0.rows() != dims.n || config_.P0.cols() != dims.n) {
    throw std::invalid_argument("dekf: Q, R, P0 dimension mismatch");
  }
  if (!(config_.theta >= 0.0)) throw std::invalid_argument("dekf: theta must be non-negative");
  if (!(config_.V0 >= 0.0)) throw std::invalid_argument("dekf: V0 must be non-negative");
  Eigen::LLT<Eigen::MatrixXd> r_llt(config_.R);
  if (r_llt.info() != Eigen::Success) throw std::invalid_argument("dekf: R must be positive definite");
  R_inv_ = symmetrize(r_llt.solve(Eigen::MatrixXd::Identity(dims.ny, dims.ny)));
  initial_set_ = {config_.P0, config_.V0, xhat0};
  validate();
}

Eigen::MatrixXd DekfObserver::unpack_P(const Eigen::VectorXd& state) const {
  const auto n = this->n();
  return symmetrize(state.segment(n, n * n).reshaped(n, n));
}

Eigen::MatrixXd DekfObserver::P() const { return unpack_P(state()); }
double DekfObserver::V() const { return state()(n() + n() * n()); }

Eigen::MatrixXd DekfObserver::gain(const Eigen::VectorXd& state) const {
  const Eigen::VectorXd xhat = state.head(n());
  return unpack_P(state) * model_->output_jacobian(xhat).transpose() * R_inv_;
}

Eigen::VectorXd DekfObserver::derivative(const Eigen::VectorXd& state, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& u) const {
  const auto n = this->n();
  const Eigen::VectorXd xhat = state.head(n);
  const Eigen::MatrixXd P = unpack_P(state);
  const double V = std::max(state(n + n * n), 0.0);

  const Eigen::MatrixXd A = model_->state_jacobian(xhat, u);
  const Eigen::MatrixXd C = model_->output_jacobian(xhat);
  const Eigen::MatrixXd L = P * C.transpose() * R_inv_;

  const Eigen::VectorXd xhat_dot =
      model_->f(xhat) + model_->g(xhat) * u + L * (y - model_->c(xhat));
  const Eigen::MatrixXd P_dot = symmetrize(P * A.transpose() + A * P - L * C * P + config_.Q +
                                           2.0 * config_.theta * P);

  Eigen::LLT<Eigen::MatrixXd> P_llt(P);
  if (P_llt.info() != Eigen::Success) throw ObserverBoundError("observer bound invalid: P not SPD");
  const double k_d = weighted_norm(model_->g_d(xhat).transpose(), P_llt) * model_->d_bar();
  const double k_v = weighted_norm((L * model_->c_d(xhat)).transpose(), P_llt) * model_->v_bar();
  const double V_dot =
      -2.0 * config_.theta * V + 2.0 * std::sqrt(V + kDekfSqrtEpsilon) * (k_d + k_v);

  return pack_dekf(xhat_dot, P_dot, V_dot);
}

Eigen::VectorXd DekfObserver::p(const Eigen::VectorXd& xhat, const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd L = gain(state());
  return model_->f(xhat) + L * (y - model_->c(xhat));
}

Eigen::MatrixXd DekfObserver::q(const Eigen::VectorXd& xhat, const Eigen::VectorXd&) const {
  return model_->g(xhat);
}

EllipsoidalBound DekfObserver::current_bound(double) const { return {P(), V(), estimate()}; }

bool DekfObserver::initial_set_contains(const Eigen::VectorXd& x0) const {
  return initial_set_.contains(x0);
}

void DekfObserver::validate() const {
  const Eigen::MatrixXd P = this->P();
  const auto n = this->n();
  const auto I = Eigen::MatrixXd::Identity(n, n);
  if (!P.allFinite() || Eigen::LLT<Eigen::MatrixXd>(P).info() != Eigen::Success) {
    throw ObserverBoundError("observer bound invalid: P lost positive definiteness");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(P - config_.p_min * I).info() != Eigen::Success ||
      Eigen::LLT<Eigen::MatrixXd>(config_.p_max * I - P).info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "observer bound invalid: spectrum of P [" << es.eigenvalues().minCoeff() << ", "
        << es.eigenvalues().maxCoeff() << "] left [" << config_.p_min << ", " << config_.p_max
        << "]";
    throw ObserverBoundError(msg.str());
  }
  if (!(V() >= 0.0)) throw ObserverBoundError("observer bound invalid: V < 0");
}

std::unique_ptr<Observer> DekfObserver::clone() const { return std::make_unique<DekfObserver>(*this); }

}  // namespace ocbf
