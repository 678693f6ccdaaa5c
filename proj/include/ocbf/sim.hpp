#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ocbf/qp.hpp"
#include "ocbf/scenario.hpp"

namespace ocbf {

struct TrajectoryRecord {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd xhat;
  Eigen::VectorXd y;
  Eigen::VectorXd u;
  double h_x = 0.0;
  double h_xhat = 0.0;
  /// M(t) for approach-1 runs, the ellipsoid level otherwise.
  double bound_level = 0.0;
  double slack = 0.0;
  QpStatus qp_status = QpStatus::kOptimal;
  /// Geometric safety measure: h itself, or the obstacle clearance.
  double safety = 0.0;
  bool contained = true;
};

enum class RunStatus { kCompleted, kQpFailure, kControllerFault };

const char* to_string(RunStatus status);

struct Trajectory {
  ModelDims dims;
  std::vector<TrajectoryRecord> records;
  /// Observer state at each record (before the step), for re-evaluating the controller.
  std::vector<Eigen::VectorXd> observer_states;
  RunStatus status = RunStatus::kCompleted;
  std::string message;
  double wall_time_s = 0.0;

  [[nodiscard]] double min_h() const;
  [[nodiscard]] double min_safety() const;
  [[nodiscard]] int containment_violations() const;
  [[nodiscard]] double containment_rate() const;
};

/// Fixed-step RK4 closed loop: plant and observer integrate together, the
/// control is held over each step, disturbances are evaluated at every RK4
/// stage.
///
/// Throws std::invalid_argument if x₀ ∉ 𝒟(x̂₀), ControllerError if x̂₀ is not an
/// admissible start, ObserverBoundError if the observer's bound breaks down.
Trajectory simulate(const Scenario& scenario);

struct LipschitzProbes {
  std::vector<double> ratios;
  [[nodiscard]] double median() const;
  [[nodiscard]] double max() const;
};

/// Finite-difference ratios ‖π(t, x̂ + Δ) − π(t, x̂)‖ / ‖Δ‖ at `count` records
/// drawn from the trajectory, with random Δ of norm `step`.
LipschitzProbes probe_lipschitz(const Scenario& scenario, const Trajectory& trajectory, int count,
                                double step = 1e-4, std::uint64_t seed = 3);

struct BatchRow {
  std::string scenario;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kCompleted;
  std::string message;
  double min_h = 0.0;
  double min_safety = 0.0;
  double containment_rate = 0.0;
  double max_lipschitz_ratio = 0.0;
  double runtime_s = 0.0;
  bool failed = false;  // threw before or during simulation
};

/// Runs every scenario under every seed (scenario seed replaced). Rows are in
/// scenario-major order regardless of `threads`.
std::vector<BatchRow> batch_run(const std::vector<Scenario>& scenarios,
                                const std::vector<std::uint64_t>& seeds, int threads = 1,
                                int lipschitz_probes = 20);

}  // namespace ocbf
