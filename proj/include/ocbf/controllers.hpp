#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ocbf/barriers.hpp"
#include "ocbf/bounds.hpp"
#include "ocbf/dynamics.hpp"
#include "ocbf/observers.hpp"
#include "ocbf/qp.hpp"

namespace ocbf {

/// Desired input π_des(t, x̂).
using NominalPolicy = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Raised for controller preconditions that fail (unsafe start, bad bounds).
class ControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FilterResult {
  Eigen::VectorXd u;
  Eigen::VectorXd u_des;
  /// Value of the filter's own constraint at u; ≥ 0 means satisfied.
  double slack = 0.0;
  QpStatus status = QpStatus::kOptimal;
};

/// argmin ‖u − u_des‖² s.t. row·u ≥ rhs.
FilterResult project_onto_halfspace(const Eigen::VectorXd& u_des, const ConstraintRow& c,
                                    const QpOptions& options = {});

/// Classic CBF-QP evaluated at the estimate as if it were the state.
FilterResult baseline_filter(const Barrier& barrier, const SystemModel& model,
                             const Eigen::VectorXd& xhat, const Eigen::VectorXd& u_des,
                             double d_bar = 0.0, const QpOptions& options = {});

/// Observer-robust QP driven by an ISS error bound.
FilterResult approach1_filter(const Barrier& barrier, const IssBound& bound,
                              const Observer& observer, double t, const Eigen::VectorXd& xhat,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& u_des,
                              const QpOptions& options = {});

/// Standard-form QP in (u, k):
///   min ½‖u‖² − u_desᵀu + ½ε‖k‖²
///   s.t. bᵢ⁻uᵢ − kᵢ ≥ 0,  bᵢ⁺uᵢ − kᵢ ≥ 0,  Σkᵢ ≥ −a
QpProblem approach2_qp(double a, const ChannelBounds& b, const Eigen::VectorXd& u_des);

/// Value of a + Σ min(bᵢ⁻uᵢ, bᵢ⁺uᵢ).
double approach2_slack(double a, const ChannelBounds& b, const Eigen::VectorXd& u);

/// Regularization on the auxiliary k variables of the standard-form QP.
inline constexpr double kAuxRegularization = 1e-9;

struct Approach2Result : FilterResult {
  double a = 0.0;
  ChannelBounds b;
  Box box;
};

/// Bounded-error QP: a common safe input for every state in 𝒫(t, x̂).
Approach2Result approach2_filter(const Barrier& barrier, const SystemModel& model,
                                 const EllipsoidalBound& bound, const Eigen::VectorXd& u_des,
                                 const QpOptions& options = {});

/// u = u_eq − K(x̂ − x_ref) with K from the CARE of the linearization.
struct LqrPolicy {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  Eigen::VectorXd u_eq;
  Eigen::VectorXd x_ref;

  [[nodiscard]] Eigen::VectorXd operator()(double t, const Eigen::VectorXd& xhat) const;
};

LqrPolicy lqr_nominal(const SystemModel& model, const Eigen::VectorXd& x_eq,
                      const Eigen::VectorXd& u_eq, const Eigen::MatrixXd& Q,
                      const Eigen::MatrixXd& R, const Eigen::VectorXd& x_ref);

enum class ControllerKind { kNominal, kBaseline, kApproach1, kApproach2 };

const char* to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

struct ControllerSettings {
  ControllerKind kind = ControllerKind::kBaseline;
  /// Disturbance bound the baseline filter robustifies against (0: plain CBF-QP).
  double baseline_d_bar = 0.0;
  int qp_iteration_cap = 100;
  /// Boundary samples used when checking 𝒫(0, x̂₀) ⊆ 𝒮.
  int initial_check_samples = 1000;
  std::uint64_t initial_check_seed = 5;
};

/// Safety filter bound to a barrier, model and nominal policy; evaluates
/// u = π(t, x̂, y) against the observer's current bound.
class SafetyController {
 public:
  SafetyController(ControllerSettings settings, BarrierPtr barrier, ModelPtr model,
                   NominalPolicy nominal);

  /// Checks the initial-estimate set of the chosen approach; throws
  /// ControllerError("x̂(0) outside safe-start set: ...").
  void check_initial(const Observer& observer) const;

  [[nodiscard]] FilterResult operator()(double t, const Observer& observer,
                                        const Eigen::VectorXd& y) const;

  /// Same as operator() with the estimate replaced by `xhat` (bounds are
  /// re-centered); used for continuity probes.
  [[nodiscard]] FilterResult evaluate_at(double t, const Observer& observer,
                                         const Eigen::VectorXd& xhat,
                                         const Eigen::VectorXd& y) const;

  [[nodiscard]] const ControllerSettings& settings() const { return settings_; }
  [[nodiscard]] const Barrier& barrier() const { return *barrier_; }
  [[nodiscard]] const NominalPolicy& nominal() const { return nominal_; }

 private:
  ControllerSettings settings_;
  BarrierPtr barrier_;
  ModelPtr model_;
  NominalPolicy nominal_;
  QpOptions qp_options_;
};

}  // namespace ocbf
