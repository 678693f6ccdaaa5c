#include "ocbf/scenario.hpp"

#include <stdexcept>

#include "ocbf/linalg.hpp"

namespace ocbf {

namespace {

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && a == b;
}

Eigen::MatrixXd positive_diag(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + " must have " + std::to_string(n) + " entries");
  }
  if ((v.array() <= 0.0).any()) throw std::invalid_argument(std::string(what) + " must be positive");
  return v.asDiagonal();
}

}  // namespace

bool operator==(const ObserverConfig& a, const ObserverConfig& b) {
  return a.type == b.type && a.theta == b.theta && a.delta == b.delta && same(a.Q_diag, b.Q_diag) &&
         same(a.R_diag, b.R_diag) && same(a.P0_diag, b.P0_diag) && a.V0 == b.V0 &&
         a.p_min == b.p_min && a.p_max == b.p_max;
}

bool operator==(const NominalConfig& a, const NominalConfig& b) {
  return same(a.Q_diag, b.Q_diag) && same(a.R_diag, b.R_diag) && same(a.x_ref, b.x_ref);
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.schema_version == b.schema_version && a.name == b.name &&
         a.description == b.description && a.model == b.model && a.barrier == b.barrier &&
         a.observer == b.observer && a.controller == b.controller && same(a.x0, b.x0) &&
         same(a.xhat0, b.xhat0) && a.d == b.d && a.v == b.v && a.horizon == b.horizon &&
         a.dt == b.dt && a.seed == b.seed;
}

std::uint64_t effective_seed(std::uint64_t scenario_seed, std::uint64_t signal_seed,
                             std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = scenario_seed * 0x9E3779B97F4A7C15ULL ^ (signal_seed + 0x632BE59BD9B4E019ULL) ^
                    (stream << 32);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScenarioComponents build_components(const Scenario& s) {
  if (s.schema_version != kScenarioSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version " + std::to_string(s.schema_version));
  }
  if (!(s.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(s.horizon >= s.dt)) throw std::invalid_argument("horizon must be at least dt");

  ModelPtr model;
  std::shared_ptr<const LinearSystem> linear;
  Eigen::VectorXd u_eq;
  if (s.model.type == "double_integrator") {
    linear = double_integrator(s.model.d_bar, s.model.v_bar);
    model = linear;
    u_eq = Eigen::VectorXd::Zero(1);
  } else if (s.model.type == "planar_quadrotor") {
    auto quad = planar_quadrotor(s.model.quad);
    u_eq = quad->hover_input();
    model = quad;
  } else {
    throw std::invalid_argument("unknown model type '" + s.model.type + "'");
  }
  const auto& dims = model->dims();
  if (s.x0.size() != dims.n || s.xhat0.size() != dims.n) {
    throw std::invalid_argument("x0 and xhat0 must have " + std::to_string(dims.n) + " entries");
  }

  BarrierPtr barrier;
  if (s.barrier.type == "di_halfspace") {
    if (dims.n != 2) throw std::invalid_argument("di_halfspace barrier needs a 2-state model");
    barrier = std::make_shared<HalfspaceBarrier>(s.barrier.alpha0, s.barrier.x_max, s.barrier.alpha,
                                                 s.barrier.kappa);
  } else if (s.barrier.type == "quad_obstacle") {
    if (dims.n != 6) throw std::invalid_argument("quad_obstacle barrier needs the quadrotor model");
    barrier = std::make_shared<ObstacleBarrier>(s.barrier.center, s.barrier.radius, s.barrier.sigma,
                                                s.barrier.alpha, s.barrier.kappa);
  } else {
    throw std::invalid_argument("unknown barrier type '" + s.barrier.type + "'");
  }

  std::unique_ptr<Observer> observer;
  if (s.observer.type == "luenberger") {
    if (!linear) throw std::invalid_argument("luenberger observer needs a linear model");
    observer = std::make_unique<LuenbergerObserver>(linear, s.observer.theta, s.observer.delta, s.xhat0);
  } else if (s.observer.type == "dekf") {
    DekfConfig cfg;
    cfg.Q = positive_diag(s.observer.Q_diag, dims.n, "observer.Q");
    cfg.R = positive_diag(s.observer.R_diag, dims.ny, "observer.R");
    cfg.P0 = positive_diag(s.observer.P0_diag, dims.n, "observer.P0");
    cfg.theta = s.observer.theta;
    cfg.V0 = s.observer.V0;
    cfg.p_min = s.observer.p_min;
    cfg.p_max = s.observer.p_max;
    observer = std::make_unique<DekfObserver>(model, cfg, s.xhat0);
  } else {
    throw std::invalid_argument("unknown observer type '" + s.observer.type + "'");
  }

  const auto& nom = s.controller.nominal;
  if (nom.x_ref.size() != dims.n) {
    throw std::invalid_argument("controller.nominal.x_ref must have " + std::to_string(dims.n) +
                                " entries");
  }
  const LqrPolicy lqr = lqr_nominal(*model, nom.x_ref, u_eq, positive_diag(nom.Q_diag, dims.n, "nominal.Q"),
                                    positive_diag(nom.R_diag, dims.m, "nominal.R"), nom.x_ref);

  ControllerSettings settings;
  settings.kind = s.controller.kind;
  settings.baseline_d_bar = s.controller.baseline_d_bar;
  settings.qp_iteration_cap = s.controller.qp_iteration_cap;
  settings.initial_check_samples = s.controller.initial_check_samples;
  auto controller = std::make_shared<SafetyController>(settings, barrier, model, lqr);

  DisturbanceSpec d = s.d;
  DisturbanceSpec v = s.v;
  d.seed = effective_seed(s.seed, d.seed, 1);
  v.seed = effective_seed(s.seed, v.seed, 2);
  if (d.magnitude > model->d_bar() * (1.0 + 1e-12)) {
    throw std::invalid_argument("disturbance d magnitude exceeds the model's d_bar");
  }
  if (v.magnitude > model->v_bar() * (1.0 + 1e-12)) {
    throw std::invalid_argument("disturbance v magnitude exceeds the model's v_bar");
  }
  DisturbanceSignal d_sig(d, dims.nd);
  DisturbanceSignal v_sig(v, dims.nv);

  return {model, barrier, std::move(observer), controller, std::move(d_sig), std::move(v_sig)};
}

}  // namespace ocbf
