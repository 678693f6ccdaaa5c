#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ocbf {

/// Dense convex QP:  minimize ½ uᵀHu + qᵀu  subject to  A u ≥ b.
///
/// H must be symmetric positive definite. A may have zero rows.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  [[nodiscard]] std::size_t num_vars() const { return static_cast<std::size_t>(q.size()); }
  [[nodiscard]] std::size_t num_constraints() const { return static_cast<std::size_t>(b.size()); }
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations };

const char* to_string(QpStatus status);

struct QpSolution {
  Eigen::VectorXd u;
  /// Indices into the rows of A that are in the final working set.
  std::vector<int> active_set;
  /// One multiplier per constraint row; zero for inactive rows.
  Eigen::VectorXd multipliers;
  QpStatus status = QpStatus::kInfeasible;
  int iterations = 0;

  [[nodiscard]] bool optimal() const { return status == QpStatus::kOptimal; }
};

struct QpOptions {
  int max_iterations = 100;
  /// Constraint violation below this is treated as satisfied.
  double feasibility_tol = 1e-12;
};

/// Goldfarb–Idnani dual active-set method on a Cholesky factor of H.
///
/// Starts from the unconstrained minimizer and adds the most violated
/// constraint each iteration (lowest index on ties), so no phase-1 is needed
/// and infeasibility falls out as an unbounded dual step.
QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

/// ‖Hu + q − Aᵀλ‖ for a candidate primal/dual pair.
double kkt_stationarity(const QpProblem& problem, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& multipliers);

/// Checks the problem-level invariants (shapes, symmetry, positive definiteness).
/// Throws std::invalid_argument describing the first violation.
void validate(const QpProblem& problem);

}  // namespace ocbf
