#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ocbf {

/// Raised when an observer or controller cannot be designed for the given data.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finds X with  M X + X Nᵀ = rhs  through the Kronecker form. Sizes here are
/// at most 6×6, so a dense LU on the n²×n² system is fine.
Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& M, const Eigen::MatrixXd& N,
                                const Eigen::MatrixXd& rhs);

/// Solves AᵀX + XA + Q = 0 for X (A Hurwitz).
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Observer Lyapunov equation  PA + AᵀP − CᵀC = −2θP.
///
/// Requires (A + θI, C) observable; the returned P is symmetric positive
/// definite. Throws DesignError("observer design infeasible") otherwise.
Eigen::MatrixXd solve_observer_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                        double theta);

struct CareSolution {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;
  int iterations = 0;
};

/// Continuous algebraic Riccati equation  AᵀP + PA − PBR⁻¹BᵀP + Q = 0
/// by Newton–Kleinman iteration. Returns P and K = R⁻¹BᵀP.
CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P);

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);
bool is_observable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, double tol = 1e-10);
bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol = 1e-10);
bool is_hurwitz(const Eigen::MatrixXd& A, double margin = 0.0);
double max_real_eigenvalue(const Eigen::MatrixXd& A);

/// Symmetric square root and inverse square root of an SPD matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& P);
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& P);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& P) { return 0.5 * (P + P.transpose()); }

}  // namespace ocbf
