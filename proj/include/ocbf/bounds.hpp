#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "ocbf/barriers.hpp"
#include "ocbf/dynamics.hpp"
#include "ocbf/interval.hpp"
#include "ocbf/observers.hpp"

namespace ocbf {

/// Axis-aligned box lo ≤ x ≤ hi.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_);
  static Box around(const Eigen::VectorXd& center, const Eigen::VectorXd& half_width);

  [[nodiscard]] Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  [[nodiscard]] Eigen::VectorXd half_width() const { return 0.5 * (hi - lo); }
  [[nodiscard]] bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  [[nodiscard]] IntervalVector intervals() const { return to_box(lo, hi); }
};

/// Per-channel enclosure b⁻ ≤ [L_g h(x)]ᵢ ≤ b⁺ over a box.
struct ChannelBounds {
  Eigen::VectorXd b_minus;
  Eigen::VectorXd b_plus;
};

/// The sign condition on the input-channel bounds failed for some channel.
class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(const std::string& what, int channel)
      : std::runtime_error(what), channel_(channel) {}
  [[nodiscard]] int channel() const { return channel_; }

 private:
  int channel_;
};

/// Smallest axis-aligned box containing the ellipsoid: half-width along axis i
/// is √(level·shapeᵢᵢ).
Box box_enclosure(const EllipsoidalBound& e);

/// Lower bound a on  L_f h(x) − κ(h(x))‖L_{g_d}h(x)‖w̄ + α(h(x))  over the box.
///
/// Every term is enclosed by interval evaluation of the barrier and the vector
/// fields; κ is non-increasing so the penalty uses κ at the lower end of h.
double bound_a(const Barrier& barrier, const SystemModel& model, const Box& box, double w_bar);
inline double bound_a(const Barrier& barrier, const SystemModel& model, const Box& box) {
  return bound_a(barrier, model, box, model.w_bar());
}

/// Interval enclosure of each [L_g h(x)]ᵢ over the box.
///
/// Throws AssumptionViolation when a channel's enclosure changes sign, or when
/// every channel is identically zero.
ChannelBounds bound_b(const Barrier& barrier, const SystemModel& model, const Box& box);

/// Point value of the expression that bound_a encloses.
double assumption_a_expression(const Barrier& barrier, const SystemModel& model,
                               const Eigen::VectorXd& x, double w_bar);

}  // namespace ocbf
