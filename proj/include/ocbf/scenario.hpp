#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "ocbf/barriers.hpp"
#include "ocbf/controllers.hpp"
#include "ocbf/disturbance.hpp"
#include "ocbf/dynamics.hpp"
#include "ocbf/observers.hpp"

namespace ocbf {

inline constexpr int kScenarioSchemaVersion = 1;

struct ModelConfig {
  std::string type = "double_integrator";  // double_integrator | planar_quadrotor
  /// Double-integrator disturbance bounds (the quadrotor takes its own).
  double d_bar = 0.0;
  double v_bar = 0.0;
  QuadrotorParams quad;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct BarrierConfig {
  std::string type = "di_halfspace";  // di_halfspace | quad_obstacle
  double alpha0 = 1.0;
  double x_max = 1.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  double sigma = 0.5;
  ClassK alpha;
  Tuning kappa;

  friend bool operator==(const BarrierConfig&, const BarrierConfig&) = default;
};

struct ObserverConfig {
  std::string type = "luenberger";  // luenberger | dekf
  double theta = 1.0;
  double delta = 0.5;  // luenberger
  Eigen::VectorXd Q_diag;
  Eigen::VectorXd R_diag;
  Eigen::VectorXd P0_diag;
  double V0 = 0.0;
  double p_min = 1e-6;
  double p_max = 1e6;

  friend bool operator==(const ObserverConfig& a, const ObserverConfig& b);
};

struct NominalConfig {
  Eigen::VectorXd Q_diag;
  Eigen::VectorXd R_diag;
  Eigen::VectorXd x_ref;

  friend bool operator==(const NominalConfig& a, const NominalConfig& b);
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kBaseline;
  double baseline_d_bar = 0.0;
  int qp_iteration_cap = 100;
  int initial_check_samples = 1000;
  NominalConfig nominal;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

/// Everything needed to reproduce one closed-loop run.
struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  ModelConfig model;
  BarrierConfig barrier;
  ObserverConfig observer;
  ControllerConfig controller;
  Eigen::VectorXd x0;
  Eigen::VectorXd xhat0;
  DisturbanceSpec d;
  DisturbanceSpec v;
  double horizon = 10.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

/// Model, barrier, observer and controller instantiated from a Scenario.
struct ScenarioComponents {
  ModelPtr model;
  BarrierPtr barrier;
  std::unique_ptr<Observer> observer;
  std::shared_ptr<SafetyController> controller;
  DisturbanceSignal d;
  DisturbanceSignal v;
};

/// Throws std::invalid_argument for inconsistent scenarios and DesignError for
/// infeasible observer/LQR designs.
ScenarioComponents build_components(const Scenario& s);

/// Disturbance seed actually used: mixes the scenario seed with the per-signal seed.
std::uint64_t effective_seed(std::uint64_t scenario_seed, std::uint64_t signal_seed,
                             std::uint64_t stream);

}  // namespace ocbf
