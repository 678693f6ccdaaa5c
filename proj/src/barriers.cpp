#include "ocbf/barriers.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ocbf {

// --- HalfspaceBarrier -------------------------------------------------------

HalfspaceBarrier::HalfspaceBarrier(double alpha0, double x_max, ClassK alpha, Tuning kappa)
    : Barrier(alpha, kappa), alpha0_(alpha0), x_max_(x_max) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("di barrier: alpha0 must be positive");
}

double HalfspaceBarrier::h(const Eigen::VectorXd& x) const {
  return -x(1) + alpha0_ * (x_max_ - x(0));
}

Eigen::RowVectorXd HalfspaceBarrier::grad(const Eigen::VectorXd&) const {
  Eigen::RowVectorXd g(2);
  g << -alpha0_, -1.0;
  return g;
}

Interval HalfspaceBarrier::h(const IntervalVector& box) const {
  return -box[1] + alpha0_ * (Interval(x_max_) - box[0]);
}

IntervalVector HalfspaceBarrier::grad(const IntervalVector&) const {
  return {Interval(-alpha0_), Interval(-1.0)};
}

double HalfspaceBarrier::gamma_h() const { return std::sqrt(alpha0_ * alpha0_ + 1.0); }

// --- ObstacleBarrier --------------------------------------------------------

ObstacleBarrier::ObstacleBarrier(Eigen::Vector2d center, double radius, double sigma, ClassK alpha,
                                 Tuning kappa)
    : Barrier(alpha, kappa), center_(std::move(center)), radius_(radius), sigma_(sigma) {
  if (!(radius > 0.0)) throw std::invalid_argument("obstacle barrier: radius must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("obstacle barrier: sigma must be positive");
  const IntervalVector box = {Interval(center_(0) - 20.0, center_(0) + 20.0),
                              Interval(center_(1) - 20.0, center_(1) + 20.0),
                              Interval(-1.6, 1.6),
                              Interval(-10.0, 10.0),
                              Interval(-10.0, 10.0),
                              Interval(-10.0, 10.0)};
  gamma_h_ = estimate_gamma_h(*this, box);
}

double ObstacleBarrier::clearance(const Eigen::VectorXd& x) const {
  return (x.head<2>() - center_).squaredNorm() - radius_ * radius_;
}

double ObstacleBarrier::h(const Eigen::VectorXd& x) const {
  const Eigen::Vector2d delta = x.head<2>() - center_;
  const double dist = delta.norm();
  if (dist == 0.0) throw std::domain_error("barrier singular");
  return dist - radius_ + sigma_ * delta.dot(x.segment<2>(3)) / dist;
}

Eigen::RowVectorXd ObstacleBarrier::grad(const Eigen::VectorXd& x) const {
  const Eigen::Vector2d delta = x.head<2>() - center_;
  const double dist = delta.norm();
  if (dist == 0.0) throw std::domain_error("barrier singular");
  const Eigen::Vector2d n = delta / dist;
  const Eigen::Vector2d v = x.segment<2>(3);
  const double range_rate = n.dot(v);
  const Eigen::Vector2d d_pos = n + sigma_ * (v - range_rate * n) / dist;
  Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(6);
  g(0) = d_pos(0);
  g(1) = d_pos(1);
  g(3) = sigma_ * n(0);
  g(4) = sigma_ * n(1);
  return g;
}

namespace {

struct ObstacleTerms {
  Interval dist;
  Interval n1, n2;
};

ObstacleTerms obstacle_terms(const Eigen::Vector2d& center, const IntervalVector& box) {
  const Interval d1 = box[0] - Interval(center(0));
  const Interval d2 = box[1] - Interval(center(1));
  const Interval dist = sqrt(sqr(d1) + sqr(d2));
  if (dist.lo() <= 0.0) throw std::domain_error("barrier singular");
  const Interval unit(-1.0, 1.0);
  const auto clip = [&unit](const Interval& v) {
    return Interval(std::max(v.lo(), unit.lo()), std::min(v.hi(), unit.hi()));
  };
  return {dist, clip(d1 / dist), clip(d2 / dist)};
}

}  // namespace

Interval ObstacleBarrier::h(const IntervalVector& box) const {
  const auto t = obstacle_terms(center_, box);
  const Interval range_rate = t.n1 * box[3] + t.n2 * box[4];
  return t.dist - Interval(radius_) + sigma_ * range_rate;
}

IntervalVector ObstacleBarrier::grad(const IntervalVector& box) const {
  const auto t = obstacle_terms(center_, box);
  const Interval range_rate = t.n1 * box[3] + t.n2 * box[4];
  const Interval inv_dist = Interval(1.0) / t.dist;
  return {t.n1 + sigma_ * (box[3] - range_rate * t.n1) * inv_dist,
          t.n2 + sigma_ * (box[4] - range_rate * t.n2) * inv_dist,
          Interval(0.0),
          sigma_ * t.n1,
          sigma_ * t.n2,
          Interval(0.0)};
}

double estimate_gamma_h(const Barrier& barrier, const IntervalVector& box, int samples,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(box.size()));
  double sup = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < box.size(); ++i) x(i) = box[i].lo() + unit(rng) * box[i].width();
    try {
      sup = std::max(sup, barrier.grad(x).norm());
    } catch (const std::domain_error&) {
      // measure-zero singular point
    }
  }
  return 1.1 * sup;
}

// --- constraint rows --------------------------------------------------------

ConstraintRow trcbf_row(const Barrier& barrier, const SystemModel& model, const Eigen::VectorXd& x,
                        double d_bar) {
  const Eigen::RowVectorXd dh = barrier.grad(x);
  const double h = barrier.h(x);
  const double lf_h = dh.dot(model.f(x));
  const double robust = barrier.kappa()(h) * (dh * model.g_d(x)).norm() * d_bar;
  return {dh * model.g(x), -lf_h + robust - barrier.alpha()(h)};
}

ConstraintRow orcbf_row(const Barrier& barrier, const IssBound& bound,
                        const Eigen::VectorXd& p_val, const Eigen::MatrixXd& q_val,
                        const Eigen::VectorXd& xhat, double t) {
  const Eigen::RowVectorXd dh = barrier.grad(xhat);
  const double gamma_h = barrier.gamma_h();
  const double margin_h = barrier.h(xhat) - gamma_h * bound.M(t);
  return {dh * q_val, -dh.dot(p_val) - barrier.alpha()(margin_h) + gamma_h * bound.Mdot(t)};
}

ConstraintRow orcbf_row(const Barrier& barrier, const IssBound& bound, const Observer& observer,
                        const Eigen::VectorXd& xhat, const Eigen::VectorXd& y, double t) {
  return orcbf_row(barrier, bound, observer.p(xhat, y), observer.q(xhat, y), xhat, t);
}

}  // namespace ocbf
