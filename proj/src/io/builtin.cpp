#include "ocbf/io/builtin.hpp"

#include <numbers>

namespace ocbf::io {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Double integrator heading for x_ref = 3 past the wall at x_max = 2; the
// estimate starts behind the true state, so a filter that trusts x̂ overshoots.
Scenario double_integrator_base(const std::string& name, ControllerKind kind) {
  Scenario s;
  s.name = name;
  s.model.type = "double_integrator";
  s.barrier.type = "di_halfspace";
  s.barrier.alpha0 = 1.0;
  s.barrier.x_max = 2.0;
  s.barrier.alpha = {ClassK::Kind::kLinear, 1.0};
  s.observer.type = "luenberger";
  s.observer.theta = 0.5;
  s.observer.delta = 0.5;
  s.controller.kind = kind;
  s.controller.nominal.Q_diag = vec({1.0, 1.0});
  s.controller.nominal.R_diag = vec({1.0});
  s.controller.nominal.x_ref = vec({3.0, 0.0});
  s.x0 = vec({0.3, 0.4});
  s.xhat0 = vec({0.0, 0.0});
  s.horizon = 10.0;
  s.dt = 1e-3;
  return s;
}

// Quadrotor crossing over a large round obstacle toward a target just off its
// surface; gusts and sensor noise at their bounds. The obstacle sits below the
// path so the thrust direction keeps a definite sign in L_g h.
Scenario quadrotor_base(const std::string& name, ControllerKind kind) {
  Scenario s;
  s.name = name;
  s.model.type = "planar_quadrotor";
  s.barrier.type = "quad_obstacle";
  s.barrier.center = Eigen::Vector2d(0.0, -3.0);
  s.barrier.radius = 3.0;
  s.barrier.sigma = 0.5;
  s.barrier.alpha = {ClassK::Kind::kLinear, 8.0};
  s.observer.type = "dekf";
  s.observer.theta = 5.0;
  s.observer.Q_diag = vec({0.3, 0.3, 0.3, 100.0, 100.0, 100.0});
  s.observer.R_diag = vec({1.0, 1.0, 3.0});
  s.observer.P0_diag = vec({20.0, 20.0, 60.0, 1200.0, 1000.0, 2700.0});
  s.observer.V0 = 0.004;
  s.controller.kind = kind;
  s.controller.nominal.Q_diag = vec({1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  s.controller.nominal.R_diag = vec({10.0, 10.0});
  s.controller.nominal.x_ref = vec({1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  s.x0 = vec({-2.5, 2.0, 0.0, 0.0, 0.0, 0.0});
  s.xhat0 = s.x0;
  s.d.kind = DisturbanceKind::kRandom;
  s.d.magnitude = s.model.quad.d_bar;
  s.v.kind = DisturbanceKind::kRandom;
  s.v.magnitude = s.model.quad.v_channel_bounds.norm();
  s.horizon = 8.0;
  s.dt = 1e-3;
  return s;
}

std::vector<Scenario> make_builtins() {
  std::vector<Scenario> out;
  {
    auto s = double_integrator_base("di_baseline", ControllerKind::kBaseline);
    s.description = "Double integrator, CBF-QP on the raw estimate (unsafe)";
    out.push_back(s);
  }
  {
    auto s = double_integrator_base("di_approach1", ControllerKind::kApproach1);
    s.description = "Double integrator, observer-robust CBF with the ISS bound";
    out.push_back(s);
  }
  {
    auto s = double_integrator_base("di_approach2", ControllerKind::kApproach2);
    s.description = "Double integrator, bounded-error CBF with the ellipsoid box";
    out.push_back(s);
  }
  {
    auto s = quadrotor_base("quad_baseline", ControllerKind::kBaseline);
    s.description = "Planar quadrotor, CBF-QP on the DEKF estimate (unsafe)";
    out.push_back(s);
  }
  {
    auto s = quadrotor_base("quad_approach2", ControllerKind::kApproach2);
    s.description = "Planar quadrotor, bounded-error CBF with the DEKF ellipsoid";
    out.push_back(s);
  }

  // Stress variants.
  for (auto kind : {ControllerKind::kApproach1, ControllerKind::kApproach2}) {
    auto s = double_integrator_base(std::string("di_") + to_string(kind) + "_disturbed", kind);
    s.description =
        std::string("Double integrator, ") + to_string(kind) + ", sinusoidal force and sensor noise";
    s.model.d_bar = 0.2;
    s.model.v_bar = 0.05;
    s.d = {DisturbanceKind::kSinusoidal, 0.2, vec({1.0}), 0.5};
    s.v.kind = DisturbanceKind::kRandom;
    s.v.magnitude = 0.05;
    out.push_back(s);
  }
  {
    auto s = quadrotor_base("quad_baseline_downdraft", ControllerKind::kBaseline);
    s.description = "Planar quadrotor, baseline filter under a steady 2 m/s² downdraft";
    s.d.kind = DisturbanceKind::kConstant;
    s.d.direction = vec({0.0, -1.0});
    out.push_back(s);
  }
  {
    auto s = quadrotor_base("quad_approach2_downdraft", ControllerKind::kApproach2);
    s.description = "Planar quadrotor, approach 2 under a steady 2 m/s² downdraft";
    s.d.kind = DisturbanceKind::kConstant;
    s.d.direction = vec({0.0, -1.0});
    out.push_back(s);
  }
  {
    auto s = quadrotor_base("quad_approach2_gust", ControllerKind::kApproach2);
    s.description = "Planar quadrotor, approach 2 under a slow oblique sinusoidal gust";
    s.d.kind = DisturbanceKind::kSinusoidal;
    s.d.direction = vec({0.6, -0.8});
    s.d.frequency = 0.5;
    out.push_back(s);
  }
  return out;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> scenarios = make_builtins();
  return scenarios;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

}  // namespace ocbf::io
