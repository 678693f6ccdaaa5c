#include "ocbf/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ocbf {

SystemModel::SystemModel(ModelDims dims, double d_bar, double v_bar)
    : dims_(dims), d_bar_(d_bar), v_bar_(v_bar) {
  if (!(d_bar >= 0.0) || !(v_bar >= 0.0)) {
    throw std::invalid_argument("model: disturbance bounds must be non-negative");
  }
}

LipschitzConstants SystemModel::lipschitz_constants(int samples, std::uint64_t seed) const {
  const IntervalVector box = operating_box();
  const auto n = dims_.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kStep = 1e-6;

  LipschitzConstants out;
  Eigen::VectorXd x(n);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) x(i) = box[i].lo() + unit(rng) * box[i].width();
    const Eigen::MatrixXd Jf = state_jacobian(x, Eigen::VectorXd::Zero(dims_.m));
    out.gamma_f = std::max(out.gamma_f, Jf.operatorNorm());
    // Jacobian of vec(g) by central differences.
    Eigen::MatrixXd Jg(static_cast<Eigen::Index>(n) * dims_.m, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += kStep;
      xm(i) -= kStep;
      const Eigen::MatrixXd dg = (g(xp) - g(xm)) / (2.0 * kStep);
      Jg.col(i) = dg.reshaped();
    }
    out.gamma_g = std::max(out.gamma_g, Jg.operatorNorm());
  }
  out.gamma_f *= 1.1;
  out.gamma_g *= 1.1;
  return out;
}

IntervalVector to_box(const Eigen::VectorXd& x) {
  IntervalVector box(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) box[i] = Interval(x(i));
  return box;
}

IntervalVector to_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  IntervalVector box(static_cast<std::size_t>(lo.size()));
  for (Eigen::Index i = 0; i < lo.size(); ++i) box[i] = Interval(lo(i), hi(i));
  return box;
}

// --- LinearSystem -----------------------------------------------------------

LinearSystem::LinearSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                           Eigen::MatrixXd G_d, Eigen::MatrixXd C_d, double d_bar, double v_bar,
                           std::string name)
    : SystemModel(ModelDims{static_cast<int>(A.rows()), static_cast<int>(B.cols()),
                            static_cast<int>(C.rows()), static_cast<int>(G_d.cols()),
                            static_cast<int>(C_d.cols())},
                  d_bar, v_bar),
      A_(std::move(A)),
      B_(std::move(B)),
      C_(std::move(C)),
      G_d_(std::move(G_d)),
      C_d_(std::move(C_d)),
      name_(std::move(name)) {
  const auto n = A_.rows();
  if (A_.cols() != n || B_.rows() != n || C_.cols() != n || G_d_.rows() != n ||
      C_d_.rows() != C_.rows()) {
    throw std::invalid_argument("linear system: inconsistent matrix dimensions");
  }
}

Eigen::VectorXd LinearSystem::f(const Eigen::VectorXd& x) const { return A_ * x; }
Eigen::MatrixXd LinearSystem::g(const Eigen::VectorXd&) const { return B_; }
Eigen::MatrixXd LinearSystem::g_d(const Eigen::VectorXd&) const { return G_d_; }
Eigen::VectorXd LinearSystem::c(const Eigen::VectorXd& x) const { return C_ * x; }
Eigen::MatrixXd LinearSystem::c_d(const Eigen::VectorXd&) const { return C_d_; }

IntervalVector LinearSystem::f(const IntervalVector& box) const {
  IntervalVector out(static_cast<std::size_t>(A_.rows()), Interval(0.0));
  for (Eigen::Index i = 0; i < A_.rows(); ++i)
    for (Eigen::Index j = 0; j < A_.cols(); ++j)
      if (A_(i, j) != 0.0) out[i] += A_(i, j) * box[j];
  return out;
}
IntervalMatrix LinearSystem::g(const IntervalVector&) const { return IntervalMatrix(B_); }
IntervalMatrix LinearSystem::g_d(const IntervalVector&) const { return IntervalMatrix(G_d_); }

Eigen::MatrixXd LinearSystem::state_jacobian(const Eigen::VectorXd&, const Eigen::VectorXd&) const {
  return A_;
}
Eigen::MatrixXd LinearSystem::output_jacobian(const Eigen::VectorXd&) const { return C_; }

IntervalVector LinearSystem::operating_box() const {
  return IntervalVector(static_cast<std::size_t>(A_.rows()), Interval(-10.0, 10.0));
}

std::shared_ptr<LinearSystem> double_integrator(double d_bar, double v_bar) {
  Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), G_d(2, 1), C_d(1, 1);
  A << 0.0, 1.0, 0.0, 0.0;
  B << 0.0, 1.0;
  C << 1.0, 0.0;
  G_d << 0.0, 1.0;
  C_d << 1.0;
  return std::make_shared<LinearSystem>(A, B, C, G_d, C_d, d_bar, v_bar, "double_integrator");
}

// --- PlanarQuadrotor --------------------------------------------------------

PlanarQuadrotor::PlanarQuadrotor(QuadrotorParams params)
    : SystemModel(ModelDims{6, 2, 3, 2, 3}, params.d_bar, params.v_channel_bounds.norm()),
      params_(params) {
  if (!(params_.mass > 0.0) || !(params_.inertia > 0.0)) {
    throw std::invalid_argument("quadrotor: mass and inertia must be positive");
  }
  if ((params_.v_channel_bounds.array() < 0.0).any()) {
    throw std::invalid_argument("quadrotor: measurement bounds must be non-negative");
  }
}

Eigen::Vector2d PlanarQuadrotor::hover_input() const {
  return {params_.mass * params_.gravity, 0.0};
}

Eigen::VectorXd PlanarQuadrotor::f(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(6);
  out << x(3), x(4), x(5), 0.0, -params_.gravity, 0.0;
  return out;
}

Eigen::MatrixXd PlanarQuadrotor::g(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(6, 2);
  out(3, 0) = std::sin(x(2)) / params_.mass;
  out(4, 0) = std::cos(x(2)) / params_.mass;
  out(5, 1) = 1.0 / params_.inertia;
  return out;
}

Eigen::MatrixXd PlanarQuadrotor::g_d(const Eigen::VectorXd&) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(6, 2);
  out(3, 0) = 1.0;
  out(4, 1) = 1.0;
  return out;
}

Eigen::VectorXd PlanarQuadrotor::c(const Eigen::VectorXd& x) const { return x.head(3); }

Eigen::MatrixXd PlanarQuadrotor::c_d(const Eigen::VectorXd&) const {
  const double scale = params_.v_channel_bounds.norm();
  if (scale == 0.0) return Eigen::MatrixXd::Zero(3, 3);
  return Eigen::MatrixXd(params_.v_channel_bounds.asDiagonal()) / scale;
}

IntervalVector PlanarQuadrotor::f(const IntervalVector& box) const {
  return {box[3], box[4], box[5], Interval(0.0), Interval(-params_.gravity), Interval(0.0)};
}

IntervalMatrix PlanarQuadrotor::g(const IntervalVector& box) const {
  IntervalMatrix out(6, 2);
  const Interval inv_mass(1.0 / params_.mass);
  out(3, 0) = sin(box[2]) * inv_mass;
  out(4, 0) = cos(box[2]) * inv_mass;
  out(5, 1) = Interval(1.0 / params_.inertia);
  return out;
}

IntervalMatrix PlanarQuadrotor::g_d(const IntervalVector& box) const {
  Eigen::VectorXd mid(6);
  for (int i = 0; i < 6; ++i) mid(i) = box[i].mid();
  return IntervalMatrix(g_d(mid));
}

Eigen::MatrixXd PlanarQuadrotor::state_jacobian(const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& u) const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
  A(0, 3) = A(1, 4) = A(2, 5) = 1.0;
  A(3, 2) = std::cos(x(2)) * u(0) / params_.mass;
  A(4, 2) = -std::sin(x(2)) * u(0) / params_.mass;
  return A;
}

Eigen::MatrixXd PlanarQuadrotor::output_jacobian(const Eigen::VectorXd&) const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 6);
  C(0, 0) = C(1, 1) = C(2, 2) = 1.0;
  return C;
}

IntervalVector PlanarQuadrotor::operating_box() const {
  const double half_pi = 0.5 * std::numbers::pi;
  return {Interval(-20.0, 20.0), Interval(-20.0, 20.0), Interval(-half_pi, half_pi),
          Interval(-10.0, 10.0), Interval(-10.0, 10.0), Interval(-10.0, 10.0)};
}

std::shared_ptr<PlanarQuadrotor> planar_quadrotor(const QuadrotorParams& params) {
  return std::make_shared<PlanarQuadrotor>(params);
}

// --- free functions ---------------------------------------------------------

Eigen::VectorXd eval_closed_loop(const SystemModel& model, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
  const auto& dims = model.dims();
  if (x.size() != dims.n || u.size() != dims.m || (d.size() != 0 && d.size() != dims.nd)) {
    throw std::invalid_argument("eval_closed_loop: dimension mismatch");
  }
  Eigen::VectorXd xdot = model.f(x) + model.g(x) * u;
  if (d.size() != 0) xdot += model.g_d(x) * d;
  return xdot;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> linearize(const SystemModel& model,
                                                      const Eigen::VectorXd& x_eq,
                                                      const Eigen::VectorXd& u_eq) {
  return {model.state_jacobian(x_eq, u_eq), model.g(x_eq)};
}

}  // namespace ocbf
