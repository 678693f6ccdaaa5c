#include "ocbf/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "ocbf/bounds.hpp"

namespace ocbf {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kQpFailure: return "qp_failure";
    case RunStatus::kControllerFault: return "controller_fault";
  }
  return "completed";
}

double Trajectory::min_h() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& r : records) out = std::min(out, r.h_x);
  return out;
}

double Trajectory::min_safety() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& r : records) out = std::min(out, r.safety);
  return out;
}

int Trajectory::containment_violations() const {
  return static_cast<int>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.contained; }));
}

double Trajectory::containment_rate() const {
  if (records.empty()) return 1.0;
  return 1.0 - static_cast<double>(containment_violations()) / static_cast<double>(records.size());
}

namespace {

std::size_t step_count(const Scenario& s) {
  return static_cast<std::size_t>(std::floor(s.horizon / s.dt + 1e-9));
}

}  // namespace

Trajectory simulate(const Scenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioComponents c = build_components(scenario);
  const SystemModel& model = *c.model;
  Observer& observer = *c.observer;
  const SafetyController& controller = *c.controller;
  const auto& dims = model.dims();

  if (!observer.initial_set_contains(scenario.x0)) {
    throw std::invalid_argument("x0 is not in the observer's initial set 𝒟(x̂₀)");
  }
  controller.check_initial(observer);

  const bool iss_run = scenario.controller.kind == ControllerKind::kApproach1;
  const auto iss = observer.iss_bound();

  Trajectory traj;
  traj.dims = dims;
  const std::size_t steps = step_count(scenario);
  traj.records.reserve(steps + 1);
  traj.observer_states.reserve(steps + 1);

  const auto measure = [&](const Eigen::VectorXd& x, double t) -> Eigen::VectorXd {
    return model.c(x) + model.c_d(x) * c.v(t);
  };

  const auto n = dims.n;
  Eigen::VectorXd x = scenario.x0;
  const double dt = scenario.dt;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Eigen::VectorXd y = measure(x, t);
    const Eigen::VectorXd xhat = observer.estimate();

    FilterResult res;
    try {
      res = controller(t, observer, y);
    } catch (const std::exception& e) {
      traj.status = RunStatus::kControllerFault;
      traj.message = "t=" + std::to_string(t) + ": " + e.what();
      break;
    }

    TrajectoryRecord rec;
    rec.t = t;
    rec.x = x;
    rec.xhat = xhat;
    rec.y = y;
    rec.u = res.u;
    rec.h_x = c.barrier->h(x);
    rec.h_xhat = c.barrier->h(xhat);
    rec.safety = c.barrier->safety_measure(x);
    rec.slack = res.slack;
    rec.qp_status = res.status;
    const EllipsoidalBound bound = observer.current_bound(t);
    rec.contained = bound.contains(x);
    rec.bound_level = bound.level;
    if (iss) {
      const double M = iss->M(t);
      rec.contained = rec.contained && (x - xhat).norm() <= M * (1.0 + 1e-9) + 1e-12;
      if (iss_run) rec.bound_level = M;
    }
    traj.records.push_back(std::move(rec));
    traj.observer_states.push_back(observer.state());

    if (res.status != QpStatus::kOptimal) {
      traj.status = RunStatus::kQpFailure;
      traj.message = "t=" + std::to_string(t) + ": QP " + to_string(res.status);
      break;
    }
    if (k == steps) break;

    // Joint RK4 over z = [x; observer state] with u held.
    const Eigen::VectorXd u = res.u;
    const Eigen::VectorXd s0 = observer.state();
    const auto deriv = [&](double tau, const Eigen::VectorXd& z) {
      Eigen::VectorXd dz(z.size());
      const Eigen::VectorXd xs = z.head(n);
      dz.head(n) = eval_closed_loop(model, xs, u, c.d(tau));
      dz.tail(z.size() - n) = observer.derivative(z.tail(z.size() - n), measure(xs, tau), u);
      return dz;
    };
    Eigen::VectorXd z(n + s0.size());
    z << x, s0;
    const Eigen::VectorXd k1 = deriv(t, z);
    const Eigen::VectorXd k2 = deriv(t + 0.5 * dt, z + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = deriv(t + 0.5 * dt, z + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = deriv(t + dt, z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x = z.head(n);
    observer.set_state(z.tail(s0.size()));
    observer.validate();
  }

  traj.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

double LipschitzProbes::median() const {
  if (ratios.empty()) return 0.0;
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const auto mid = sorted.size() / 2;
  return sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double LipschitzProbes::max() const {
  return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

LipschitzProbes probe_lipschitz(const Scenario& scenario, const Trajectory& trajectory, int count,
                                double step, std::uint64_t seed) {
  LipschitzProbes out;
  if (trajectory.records.empty() || count <= 0) return out;
  ScenarioComponents c = build_components(scenario);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, trajectory.records.size() - 1);
  std::normal_distribution<double> normal;
  const auto n = trajectory.dims.n;
  out.ratios.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::size_t k = pick(rng);
    const auto& rec = trajectory.records[k];
    c.observer->set_state(trajectory.observer_states[k]);
    Eigen::VectorXd delta(n);
    for (Eigen::Index j = 0; j < n; ++j) delta(j) = normal(rng);
    delta *= step / delta.norm();
    try {
      const FilterResult u0 = c.controller->evaluate_at(rec.t, *c.observer, rec.xhat, rec.y);
      const FilterResult u1 = c.controller->evaluate_at(rec.t, *c.observer, rec.xhat + delta, rec.y);
      out.ratios.push_back((u1.u - u0.u).norm() / step);
    } catch (const std::exception&) {
      out.ratios.push_back(std::numeric_limits<double>::infinity());
    }
  }
  return out;
}

std::vector<BatchRow> batch_run(const std::vector<Scenario>& scenarios,
                                const std::vector<std::uint64_t>& seeds, int threads,
                                int lipschitz_probes) {
  std::vector<BatchRow> rows(scenarios.size() * seeds.size());
  const auto run_one = [&](std::size_t idx) {
    const Scenario& base = scenarios[idx / seeds.size()];
    Scenario s = base;
    s.seed = seeds[idx % seeds.size()];
    BatchRow& row = rows[idx];
    row.scenario = s.name;
    row.seed = s.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Trajectory traj = simulate(s);
      row.status = traj.status;
      row.message = traj.message;
      row.min_h = traj.min_h();
      row.min_safety = traj.min_safety();
      row.containment_rate = traj.containment_rate();
      row.max_lipschitz_ratio = probe_lipschitz(s, traj, lipschitz_probes).max();
    } catch (const std::exception& e) {
      row.failed = true;
      row.message = e.what();
      row.min_h = row.min_safety = std::numeric_limits<double>::quiet_NaN();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t total = rows.size();
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || total <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
    return rows;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < total; i += workers) run_one(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace ocbf
