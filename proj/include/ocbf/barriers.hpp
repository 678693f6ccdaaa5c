#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "ocbf/dynamics.hpp"
#include "ocbf/interval.hpp"
#include "ocbf/observers.hpp"

namespace ocbf {

/// Extended class-K gain α: linear γr or cubic γr³.
struct ClassK {
  enum class Kind { kLinear, kCubic };
  Kind kind = Kind::kLinear;
  double gain = 1.0;

  [[nodiscard]] double operator()(double r) const {
    return kind == Kind::kLinear ? gain * r : gain * r * r * r;
  }
  /// α is increasing, so the image of [lo, hi] is [α(lo), α(hi)].
  [[nodiscard]] Interval operator()(const Interval& r) const { return {(*this)(r.lo()), (*this)(r.hi())}; }

  friend bool operator==(const ClassK&, const ClassK&) = default;
};

/// Robustness tuning κ with κ(0) = 1, non-increasing: κ ≡ 1 or κ(r) = 2/(1 + eʳ).
struct Tuning {
  enum class Kind { kOne, kLogistic };
  Kind kind = Kind::kOne;

  [[nodiscard]] double operator()(double r) const {
    return kind == Kind::kOne ? 1.0 : 2.0 / (1.0 + std::exp(r));
  }
  [[nodiscard]] Interval operator()(const Interval& r) const { return {(*this)(r.hi()), (*this)(r.lo())}; }

  friend bool operator==(const Tuning&, const Tuning&) = default;
};

/// Barrier h with safe set {h ≥ 0}, its gradient, Lipschitz constant γ_h and
/// the α/κ functions that define the robust barrier condition.
class Barrier {
 public:
  Barrier(ClassK alpha, Tuning kappa) : alpha_(alpha), kappa_(kappa) {}
  virtual ~Barrier() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual double h(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Eigen::RowVectorXd grad(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Interval h(const IntervalVector& box) const = 0;
  [[nodiscard]] virtual IntervalVector grad(const IntervalVector& box) const = 0;
  [[nodiscard]] virtual double gamma_h() const = 0;
  /// Quantity whose sign defines safety; h unless the barrier is a surrogate.
  [[nodiscard]] virtual double safety_measure(const Eigen::VectorXd& x) const { return h(x); }

  [[nodiscard]] const ClassK& alpha() const { return alpha_; }
  [[nodiscard]] const Tuning& kappa() const { return kappa_; }

 private:
  ClassK alpha_;
  Tuning kappa_;
};

using BarrierPtr = std::shared_ptr<const Barrier>;

/// h(x) = −x₂ + α₀(x_max − x₁) for the double integrator; keeps x₁ ≤ x_max
/// with enough room to brake.
class HalfspaceBarrier final : public Barrier {
 public:
  HalfspaceBarrier(double alpha0, double x_max, ClassK alpha = {}, Tuning kappa = {});

  [[nodiscard]] std::string name() const override { return "di_halfspace"; }
  [[nodiscard]] double h(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::RowVectorXd grad(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Interval h(const IntervalVector& box) const override;
  [[nodiscard]] IntervalVector grad(const IntervalVector& box) const override;
  /// √(α₀² + 1), exact since the gradient is constant.
  [[nodiscard]] double gamma_h() const override;

  [[nodiscard]] double alpha0() const { return alpha0_; }
  [[nodiscard]] double x_max() const { return x_max_; }

 private:
  double alpha0_;
  double x_max_;
};

/// Circular obstacle for the planar quadrotor, relative degree one in thrust:
///
///   h(x) = D − r + σ (Δ·v)/D,   Δ = (x₁, x₂) − center, D = ‖Δ‖, v = (x₄, x₅)
///
/// i.e. clearance plus σ times the range rate. Keeping h ≥ 0 gives
/// d/dt(D − r) ≥ −(D − r)/σ, so a positive clearance stays positive.
class ObstacleBarrier final : public Barrier {
 public:
  ObstacleBarrier(Eigen::Vector2d center, double radius, double sigma, ClassK alpha = {},
                  Tuning kappa = {});

  [[nodiscard]] std::string name() const override { return "quad_obstacle"; }
  [[nodiscard]] double h(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::RowVectorXd grad(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Interval h(const IntervalVector& box) const override;
  [[nodiscard]] IntervalVector grad(const IntervalVector& box) const override;
  /// Sampled sup of ‖∇h‖ over the operating box, inflated by 10%.
  [[nodiscard]] double gamma_h() const override { return gamma_h_; }

  /// Clearance ‖(x₁, x₂) − center‖² − r².
  [[nodiscard]] double clearance(const Eigen::VectorXd& x) const;
  [[nodiscard]] double safety_measure(const Eigen::VectorXd& x) const override {
    return clearance(x);
  }
  [[nodiscard]] const Eigen::Vector2d& center() const { return center_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] double sigma() const { return sigma_; }

 private:
  Eigen::Vector2d center_;
  double radius_;
  double sigma_;
  double gamma_h_;
};

/// Sampled supremum of ‖∇h‖ over a box, inflated by 10%.
double estimate_gamma_h(const Barrier& barrier, const IntervalVector& box, int samples = 20000,
                        std::uint64_t seed = 11);

/// A single affine constraint  row·u ≥ rhs.
struct ConstraintRow {
  Eigen::RowVectorXd row;
  double rhs = 0.0;

  [[nodiscard]] double slack(const Eigen::VectorXd& u) const { return row.dot(u) - rhs; }
};

/// Robust barrier condition at a state x:
///   L_g h·u ≥ −L_f h + κ(h)‖L_{g_d}h‖d̄ − α(h)
ConstraintRow trcbf_row(const Barrier& barrier, const SystemModel& model, const Eigen::VectorXd& x,
                        double d_bar);
inline ConstraintRow trcbf_row(const Barrier& barrier, const SystemModel& model,
                               const Eigen::VectorXd& x) {
  return trcbf_row(barrier, model, x, model.d_bar());
}

/// Observer-robust condition on the estimate:
///   L_q h·u ≥ −L_p h − α(h(x̂) − γ_h M(t)) + γ_h Ṁ(t)
/// where p, q are the observer's vector fields evaluated at (x̂, y).
ConstraintRow orcbf_row(const Barrier& barrier, const IssBound& bound,
                        const Eigen::VectorXd& p_val, const Eigen::MatrixXd& q_val,
                        const Eigen::VectorXd& xhat, double t);
ConstraintRow orcbf_row(const Barrier& barrier, const IssBound& bound, const Observer& observer,
                        const Eigen::VectorXd& xhat, const Eigen::VectorXd& y, double t);

}  // namespace ocbf
