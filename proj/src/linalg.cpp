#include "ocbf/linalg.hpp"

#include <cmath>
#include <complex>

namespace ocbf {

Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& M, const Eigen::MatrixXd& N,
                                const Eigen::MatrixXd& rhs) {
  const auto n = M.rows();
  const auto k = N.rows();
  // vec(MX) = (I⊗M) vec X,  vec(XNᵀ) = (N⊗I) vec X
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * k, n * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    big.block(j * n, j * n, n, n) += M;
    for (Eigen::Index i = 0; i < k; ++i) {
      big.block(j * n, i * n, n, n) += N(j, i) * Eigen::MatrixXd::Identity(n, n);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
  if (!lu.isInvertible()) throw DesignError("sylvester: singular operator");
  const Eigen::VectorXd x = lu.solve(rhs.reshaped());
  return x.reshaped(n, k);
}

Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  return symmetrize(solve_sylvester(A.transpose(), A.transpose(), -Q));
}

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const auto n = A.rows();
  Eigen::MatrixXd O(C.rows() * n, n);
  Eigen::MatrixXd block = C;
  for (Eigen::Index i = 0; i < n; ++i) {
    O.middleRows(i * C.rows(), C.rows()) = block;
    block = block * A;
  }
  return O;
}

bool is_observable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(observability_matrix(A, C));
  const auto& s = svd.singularValues();
  return s.size() >= A.rows() && s(A.rows() - 1) > tol * std::max(1.0, s(0));
}

bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol) {
  // PBH test on the closed right half plane.
  const auto n = A.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (lambda.real() < 0.0) continue;
    Eigen::MatrixXcd pbh(n, n + B.cols());
    pbh.leftCols(n) = A.cast<std::complex<double>>() -
                      lambda * Eigen::MatrixXcd::Identity(n, n);
    pbh.rightCols(B.cols()) = B.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    const auto& s = svd.singularValues();
    if (s(n - 1) <= tol * std::max(1.0, s(0))) return false;
  }
  return true;
}

double max_real_eigenvalue(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Eigen::MatrixXd& A, double margin) {
  return max_real_eigenvalue(A) < -margin;
}

Eigen::MatrixXd solve_observer_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                        double theta) {
  if (!(theta > 0.0)) throw DesignError("observer design infeasible: theta must be positive");
  const auto n = A.rows();
  const Eigen::MatrixXd shifted = A + theta * Eigen::MatrixXd::Identity(n, n);
  if (!is_observable(shifted, C)) throw DesignError("observer design infeasible");
  // P(A+θI) + (A+θI)ᵀP = CᵀC
  Eigen::MatrixXd P =
      symmetrize(solve_sylvester(shifted.transpose(), shifted.transpose(), C.transpose() * C));
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw DesignError("observer design infeasible");
  return P;
}

double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd res =
      A.transpose() * P + P * A - P * B * R.llt().solve(B.transpose()) * P + Q;
  return res.norm();
}

namespace {

// Bass' method: for β > ‖A‖ and (A, B) controllable, K = BᵀZ⁻¹ with
// (A+βI)Z + Z(A+βI)ᵀ = 2BBᵀ makes A − BK Hurwitz.
Eigen::MatrixXd initial_stabilizing_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const auto n = A.rows();
  if (is_hurwitz(A)) return Eigen::MatrixXd::Zero(B.cols(), n);
  const double beta = 1.0 + A.operatorNorm();
  const Eigen::MatrixXd shifted = A + beta * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Z = solve_sylvester(shifted, shifted, 2.0 * B * B.transpose());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Z);
  if (!lu.isInvertible()) throw DesignError("care: could not find an initial stabilizing gain");
  return B.transpose() * lu.inverse();
}

}  // namespace

CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw std::invalid_argument("care: dimension mismatch");
  }
  if (!is_stabilizable(A, B)) throw DesignError("care: (A, B) is not stabilizable");
  Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success) throw DesignError("care: R is not positive definite");

  CareSolution sol;
  sol.K = initial_stabilizing_gain(A, B);
  if (!is_hurwitz(A - B * sol.K)) throw DesignError("care: initial gain is not stabilizing");

  constexpr int kMaxIterations = 100;
  Eigen::MatrixXd P_prev = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::MatrixXd Acl = A - B * sol.K;
    // Acl ᵀP + P Acl + Q + KᵀRK = 0
    sol.P = solve_continuous_lyapunov(Acl, Q + sol.K.transpose() * R * sol.K);
    sol.K = r_llt.solve(B.transpose() * sol.P);
    sol.iterations = it;
    if ((sol.P - P_prev).norm() <= 1e-13 * std::max(1.0, sol.P.norm())) break;
    P_prev = sol.P;
  }
  if (!sol.P.allFinite() || !is_hurwitz(A - B * sol.K)) throw DesignError("care: iteration diverged");
  return sol;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  return es.operatorSqrt();
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  return es.operatorInverseSqrt();
}

}  // namespace ocbf
