#include "ocbf/bounds.hpp"

#include <cmath>
#include <sstream>

namespace ocbf {

Box::Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || (lo.array() > hi.array()).any()) {
    throw std::invalid_argument("box: lo must not exceed hi");
  }
}

Box Box::around(const Eigen::VectorXd& center, const Eigen::VectorXd& half_width) {
  return {center - half_width, center + half_width};
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  return ((x.array() >= lo.array() - tol) && (x.array() <= hi.array() + tol)).all();
}

Box box_enclosure(const EllipsoidalBound& e) {
  const Eigen::VectorXd half = (e.level * e.shape.diagonal().array()).max(0.0).sqrt();
  return Box::around(e.center, half);
}

double assumption_a_expression(const Barrier& barrier, const SystemModel& model,
                               const Eigen::VectorXd& x, double w_bar) {
  const Eigen::RowVectorXd dh = barrier.grad(x);
  const double h = barrier.h(x);
  return dh.dot(model.f(x)) - barrier.kappa()(h) * (dh * model.g_d(x)).norm() * w_bar +
         barrier.alpha()(h);
}

double bound_a(const Barrier& barrier, const SystemModel& model, const Box& box, double w_bar) {
  const IntervalVector iv = box.intervals();
  const IntervalVector dh = barrier.grad(iv);
  const Interval h = barrier.h(iv);
  const Interval lf_h = dot(dh, model.f(iv));
  const Interval lgd_norm = norm(row_times(dh, model.g_d(iv)));
  const Interval penalty = barrier.kappa()(h) * lgd_norm * Interval(w_bar);
  return (lf_h - penalty + barrier.alpha()(h)).lo();
}

ChannelBounds bound_b(const Barrier& barrier, const SystemModel& model, const Box& box) {
  const IntervalVector iv = box.intervals();
  const IntervalVector lg_h = row_times(barrier.grad(iv), model.g(iv));
  const auto m = static_cast<Eigen::Index>(lg_h.size());
  ChannelBounds out{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  const auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  bool any_nonzero = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    out.b_minus(i) = lg_h[i].lo();
    out.b_plus(i) = lg_h[i].hi();
    if (sign(out.b_minus(i)) != sign(out.b_plus(i))) {
      std::ostringstream msg;
      msg << "assumption 2 violated: input channel " << i << " bound [" << out.b_minus(i) << ", "
          << out.b_plus(i) << "] changes sign";
      throw AssumptionViolation(msg.str(), static_cast<int>(i));
    }
    any_nonzero = any_nonzero || out.b_minus(i) != 0.0;
  }
  if (!any_nonzero) {
    throw AssumptionViolation("assumption 2 violated: L_g h is identically zero on the box", -1);
  }
  return out;
}

}  // namespace ocbf
