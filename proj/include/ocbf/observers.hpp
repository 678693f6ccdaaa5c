#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ocbf/dynamics.hpp"

namespace ocbf {

/// Thrown when an observer's error-bound bookkeeping stops being valid
/// (covariance-like matrix loses definiteness or leaves its declared bounds).
class ObserverBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ISS error bound  M(t) = transient·e^{−rate·t} + floor,  ‖x(t) − x̂(t)‖ ≤ M(t).
struct IssBound {
  double delta = 0.0;
  double transient = 0.0;
  double rate = 0.0;
  double floor = 0.0;

  [[nodiscard]] double M(double t) const { return transient * std::exp(-rate * t) + floor; }
  [[nodiscard]] double Mdot(double t) const { return -rate * transient * std::exp(-rate * t); }
};

/// {x : (x − center)ᵀ shape⁻¹ (x − center) ≤ level}
struct EllipsoidalBound {
  Eigen::MatrixXd shape;
  double level = 0.0;
  Eigen::VectorXd center;

  /// (x − center)ᵀ shape⁻¹ (x − center)
  [[nodiscard]] double quadratic_form(const Eigen::VectorXd& x) const;
  [[nodiscard]] bool contains(const Eigen::VectorXd& x, double rel_tol = 1e-9) const;
  /// Point on the boundary along unit direction `dir` (in the shape's metric).
  [[nodiscard]] Eigen::VectorXd boundary_point(const Eigen::VectorXd& dir) const;
};

/// Norm ball of radius M as an ellipsoid: shape = I, level = M².
EllipsoidalBound as_ellipsoid(const IssBound& bound, double t, const Eigen::VectorXd& center);

/// Common interface of the estimate-feedback observers
///   ẋ̂ = p(x̂, y) + q(x̂, y) u.
///
/// The observer owns a flat state vector whose first n entries are x̂; any
/// auxiliary states (covariance, error level) follow.
class Observer {
 public:
  virtual ~Observer() = default;

  [[nodiscard]] virtual std::string kind() const = 0;
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const Eigen::VectorXd& state() const { return state_; }
  void set_state(Eigen::VectorXd state);
  [[nodiscard]] Eigen::VectorXd estimate() const { return state_.head(n_); }

  [[nodiscard]] virtual Eigen::VectorXd derivative(const Eigen::VectorXd& state,
                                                   const Eigen::VectorXd& y,
                                                   const Eigen::VectorXd& u) const = 0;
  [[nodiscard]] virtual Eigen::VectorXd p(const Eigen::VectorXd& xhat,
                                          const Eigen::VectorXd& y) const = 0;
  [[nodiscard]] virtual Eigen::MatrixXd q(const Eigen::VectorXd& xhat,
                                          const Eigen::VectorXd& y) const = 0;

  /// 𝒫(t, x̂) at the current state.
  [[nodiscard]] virtual EllipsoidalBound current_bound(double t) const = 0;
  /// Only ISS observers provide M_δ.
  [[nodiscard]] virtual std::optional<IssBound> iss_bound() const { return std::nullopt; }
  /// Is x₀ in the initial-condition set 𝒟(x̂₀)?
  [[nodiscard]] virtual bool initial_set_contains(const Eigen::VectorXd& x0) const = 0;
  /// Throws ObserverBoundError when the bound bookkeeping is no longer valid.
  virtual void validate() const {}

  /// One RK4 step with y and u held over [t, t + dt].
  void step(const Eigen::VectorXd& y, const Eigen::VectorXd& u, double dt);

  [[nodiscard]] virtual std::unique_ptr<Observer> clone() const = 0;

 protected:
  Observer(int n, Eigen::VectorXd initial_state);

 private:
  int n_;
  Eigen::VectorXd state_;
};

/// x̂' = Ax̂ + Bu + L(y − Cx̂),  L = ½P⁻¹Cᵀ,  PA + AᵀP − CᵀC = −2θP.
///
/// With ‖x₀ − x̂₀‖ ≤ δ the error satisfies (x − x̂)ᵀP(x − x̂) ≤ s(t)² where
/// s(t) = max(√λmax δ − η, 0)e^{−θt} + η and η = (‖P^½G_d‖d̄ + ‖P^½LC_d‖v̄)/θ.
/// Without disturbances η = 0 and this is the classical λmax δ² e^{−2θt}.
class LuenbergerObserver final : public Observer {
 public:
  LuenbergerObserver(std::shared_ptr<const LinearSystem> model, double theta, double delta,
                     const Eigen::VectorXd& xhat0);

  [[nodiscard]] std::string kind() const override { return "luenberger"; }
  [[nodiscard]] const Eigen::MatrixXd& P() const { return P_; }
  [[nodiscard]] const Eigen::VectorXd& L() const { return L_; }
  [[nodiscard]] const Eigen::MatrixXd& gain() const { return gain_; }
  [[nodiscard]] double theta() const { return theta_; }
  [[nodiscard]] double delta() const { return delta_; }
  /// s(t)², the bound on (x − x̂)ᵀP(x − x̂).
  [[nodiscard]] double level(double t) const;

  [[nodiscard]] Eigen::VectorXd derivative(const Eigen::VectorXd& state, const Eigen::VectorXd& y,
                                           const Eigen::VectorXd& u) const override;
  [[nodiscard]] Eigen::VectorXd p(const Eigen::VectorXd& xhat,
                                  const Eigen::VectorXd& y) const override;
  [[nodiscard]] Eigen::MatrixXd q(const Eigen::VectorXd& xhat,
                                  const Eigen::VectorXd& y) const override;
  [[nodiscard]] EllipsoidalBound current_bound(double t) const override;
  [[nodiscard]] std::optional<IssBound> iss_bound() const override { return iss_; }
  [[nodiscard]] bool initial_set_contains(const Eigen::VectorXd& x0) const override;
  [[nodiscard]] std::unique_ptr<Observer> clone() const override;

 private:
  std::shared_ptr<const LinearSystem> model_;
  double theta_;
  double delta_;
  Eigen::MatrixXd P_;
  Eigen::MatrixXd P_inv_;
  Eigen::MatrixXd gain_;  // L as an n×n_y matrix
  Eigen::VectorXd L_;     // first column of the gain, convenient for n_y = 1
  Eigen::VectorXd xhat0_;
  double sqrt_lmax_ = 0.0;
  double eta_ = 0.0;
  IssBound iss_;
};

struct DekfConfig {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  double theta = 0.0;
  Eigen::MatrixXd P0;
  double V0 = 0.0;
  /// Declared bounds p₁I ⪯ P ⪯ p₂I, monitored every step.
  double p_min = 1e-6;
  double p_max = 1e6;
};

/// Deterministic EKF with bounded disturbances. State layout [x̂, vec(P), V].
///
///   x̂' = f(x̂) + g(x̂)u + L(y − c(x̂)),  L = PCᵀR⁻¹
///   P' = PAᵀ + AP − PCᵀR⁻¹CP + Q + 2θP
///   V' = −2θV + 2√V (‖D₁ᵀP^{−½}‖d̄ + ‖(LD₂)ᵀP^{−½}‖v̄)
///
/// with A = ∂(f + gu)/∂x̂, C = ∂c/∂x̂, D₁ = g_d, D₂ = c_d. The error set is
/// {x : (x − x̂)ᵀP⁻¹(x − x̂) ≤ V}.
class DekfObserver final : public Observer {
 public:
  DekfObserver(ModelPtr model, DekfConfig config, const Eigen::VectorXd& xhat0);

  [[nodiscard]] std::string kind() const override { return "dekf"; }
  [[nodiscard]] Eigen::MatrixXd P() const;
  [[nodiscard]] double V() const;
  [[nodiscard]] const DekfConfig& config() const { return config_; }
  [[nodiscard]] Eigen::MatrixXd gain(const Eigen::VectorXd& state) const;

  [[nodiscard]] Eigen::VectorXd derivative(const Eigen::VectorXd& state, const Eigen::VectorXd& y,
                                           const Eigen::VectorXd& u) const override;
  [[nodiscard]] Eigen::VectorXd p(const Eigen::VectorXd& xhat,
                                  const Eigen::VectorXd& y) const override;
  [[nodiscard]] Eigen::MatrixXd q(const Eigen::VectorXd& xhat,
                                  const Eigen::VectorXd& y) const override;
  [[nodiscard]] EllipsoidalBound current_bound(double t) const override;
  [[nodiscard]] bool initial_set_contains(const Eigen::VectorXd& x0) const override;
  void validate() const override;
  [[nodiscard]] std::unique_ptr<Observer> clone() const override;

 private:
  [[nodiscard]] Eigen::MatrixXd unpack_P(const Eigen::VectorXd& state) const;

  ModelPtr model_;
  DekfConfig config_;
  Eigen::MatrixXd R_inv_;
  EllipsoidalBound initial_set_;
};

/// Regularization inside the √V generator term of the DEKF level equation.
inline constexpr double kDekfSqrtEpsilon = 1e-12;

}  // namespace ocbf
