#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "ocbf/interval.hpp"

namespace ocbf {

struct ModelDims {
  int n = 0;   // state
  int m = 0;   // input
  int ny = 0;  // output
  int nd = 0;  // dynamics disturbance
  int nv = 0;  // measurement disturbance
};

/// Lipschitz constants over the model's operating box, from sampled Jacobian
/// norms inflated by 10%.
struct LipschitzConstants {
  double gamma_f = 0.0;
  double gamma_g = 0.0;
};

/// Control-affine plant  ẋ = f(x) + g(x)u + g_d(x)d,  y = c(x) + c_d(x)v,
/// with ‖d‖ ≤ d̄ and ‖v‖ ≤ v̄.
///
/// Every field has a point evaluation and an interval evaluation over a box;
/// the latter encloses the range of the field on that box.
class SystemModel {
 public:
  SystemModel(ModelDims dims, double d_bar, double v_bar);
  virtual ~SystemModel() = default;

  [[nodiscard]] const ModelDims& dims() const { return dims_; }
  [[nodiscard]] double d_bar() const { return d_bar_; }
  [[nodiscard]] double v_bar() const { return v_bar_; }
  /// w̄ = max(d̄, v̄)
  [[nodiscard]] double w_bar() const { return std::max(d_bar_, v_bar_); }
  [[nodiscard]] virtual std::string name() const = 0;

  [[nodiscard]] virtual Eigen::VectorXd f(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Eigen::MatrixXd g(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Eigen::MatrixXd g_d(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Eigen::VectorXd c(const Eigen::VectorXd& x) const = 0;
  [[nodiscard]] virtual Eigen::MatrixXd c_d(const Eigen::VectorXd& x) const = 0;

  [[nodiscard]] virtual IntervalVector f(const IntervalVector& box) const = 0;
  [[nodiscard]] virtual IntervalMatrix g(const IntervalVector& box) const = 0;
  [[nodiscard]] virtual IntervalMatrix g_d(const IntervalVector& box) const = 0;

  /// ∂(f + g u)/∂x at (x, u).
  [[nodiscard]] virtual Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& x,
                                                       const Eigen::VectorXd& u) const = 0;
  /// ∂c/∂x at x.
  [[nodiscard]] virtual Eigen::MatrixXd output_jacobian(const Eigen::VectorXd& x) const = 0;

  /// Operating box used for Lipschitz estimates.
  [[nodiscard]] virtual IntervalVector operating_box() const = 0;
  [[nodiscard]] LipschitzConstants lipschitz_constants(int samples = 2000,
                                                       std::uint64_t seed = 7) const;

 private:
  ModelDims dims_;
  double d_bar_;
  double v_bar_;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

/// ẋ = Ax + Bu + G_d d,  y = Cx + C_d v.
class LinearSystem final : public SystemModel {
 public:
  LinearSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd G_d,
               Eigen::MatrixXd C_d, double d_bar, double v_bar, std::string name = "linear");

  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] const Eigen::MatrixXd& A() const { return A_; }
  [[nodiscard]] const Eigen::MatrixXd& B() const { return B_; }
  [[nodiscard]] const Eigen::MatrixXd& C() const { return C_; }

  [[nodiscard]] Eigen::VectorXd f(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd g(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd g_d(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::VectorXd c(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd c_d(const Eigen::VectorXd& x) const override;
  [[nodiscard]] IntervalVector f(const IntervalVector& box) const override;
  [[nodiscard]] IntervalMatrix g(const IntervalVector& box) const override;
  [[nodiscard]] IntervalMatrix g_d(const IntervalVector& box) const override;
  [[nodiscard]] Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& u) const override;
  [[nodiscard]] Eigen::MatrixXd output_jacobian(const Eigen::VectorXd& x) const override;
  [[nodiscard]] IntervalVector operating_box() const override;

 private:
  Eigen::MatrixXd A_, B_, C_, G_d_, C_d_;
  std::string name_;
};

struct QuadrotorParams {
  double mass = 1.0;      // kg
  double inertia = 0.25;  // kg m²
  double gravity = 9.81;  // m/s²
  double d_bar = 2.0;     // m/s²
  /// Per-channel measurement bounds on (x₁, x₂, x₃): 5 cm, 5 cm, 5°.
  Eigen::Vector3d v_channel_bounds{0.05, 0.05, 5.0 * std::numbers::pi / 180.0};

  friend bool operator==(const QuadrotorParams&, const QuadrotorParams&) = default;
};

/// Planar quadrotor, state (x₁, x₂, pitch, ẋ₁, ẋ₂, pitch rate), input (thrust,
/// torque). Dynamics disturbances act on the two translational accelerations.
///
/// Measurement noise uses c_d = diag(b)/‖b‖ with v̄ = ‖b‖ for the per-channel
/// bounds b, so c_d·v stays inside the ellipsoid Σ(noiseᵢ/bᵢ)² ≤ 1.
class PlanarQuadrotor final : public SystemModel {
 public:
  explicit PlanarQuadrotor(QuadrotorParams params = {});

  [[nodiscard]] std::string name() const override { return "planar_quadrotor"; }
  [[nodiscard]] const QuadrotorParams& params() const { return params_; }
  [[nodiscard]] Eigen::Vector2d hover_input() const;

  [[nodiscard]] Eigen::VectorXd f(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd g(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd g_d(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::VectorXd c(const Eigen::VectorXd& x) const override;
  [[nodiscard]] Eigen::MatrixXd c_d(const Eigen::VectorXd& x) const override;
  [[nodiscard]] IntervalVector f(const IntervalVector& box) const override;
  [[nodiscard]] IntervalMatrix g(const IntervalVector& box) const override;
  [[nodiscard]] IntervalMatrix g_d(const IntervalVector& box) const override;
  [[nodiscard]] Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& u) const override;
  [[nodiscard]] Eigen::MatrixXd output_jacobian(const Eigen::VectorXd& x) const override;
  [[nodiscard]] IntervalVector operating_box() const override;

 private:
  QuadrotorParams params_;
};

/// ẋ₁ = x₂, ẋ₂ = u, y = x₁. Disturbance channels enter the velocity and the
/// measurement with bounds that default to zero.
std::shared_ptr<LinearSystem> double_integrator(double d_bar = 0.0, double v_bar = 0.0);

std::shared_ptr<PlanarQuadrotor> planar_quadrotor(const QuadrotorParams& params = {});

/// f(x) + g(x)u + g_d(x)d. An empty d means no disturbance.
Eigen::VectorXd eval_closed_loop(const SystemModel& model, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& d = {});

/// Linearization about (x_eq, u_eq): returns (A, B).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> linearize(const SystemModel& model,
                                                      const Eigen::VectorXd& x_eq,
                                                      const Eigen::VectorXd& u_eq);

/// Point vector → degenerate box.
IntervalVector to_box(const Eigen::VectorXd& x);
IntervalVector to_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace ocbf
