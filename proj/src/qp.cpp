#include "ocbf/qp.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ocbf {

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIterations: return "max_iterations";
  }
  return "unknown";
}

void validate(const QpProblem& p) {
  const auto n = p.q.size();
  if (n == 0) throw std::invalid_argument("qp: no decision variables");
  if (p.H.rows() != n || p.H.cols() != n) throw std::invalid_argument("qp: H must be n×n");
  if (p.A.rows() != p.b.size()) throw std::invalid_argument("qp: A and b row counts differ");
  if (p.A.rows() > 0 && p.A.cols() != n) throw std::invalid_argument("qp: A must have n columns");
  if (!p.H.allFinite() || !p.q.allFinite() || !p.A.allFinite() || !p.b.allFinite()) {
    throw std::invalid_argument("qp: non-finite data");
  }
  const double scale = std::max(1.0, p.H.cwiseAbs().maxCoeff());
  if ((p.H - p.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("qp: H is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.H, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues()(0) <= 0.0) throw std::invalid_argument("qp: H is not positive definite");
}

double kkt_stationarity(const QpProblem& p, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& multipliers) {
  Eigen::VectorXd g = p.H * u + p.q;
  if (p.A.rows() > 0) g -= p.A.transpose() * multipliers;
  return g.norm();
}

namespace {

// Working-set factorization: Jᵀ N_active = [R; 0] with J J ᵀ = H⁻¹.
class WorkingSet {
 public:
  explicit WorkingSet(const Eigen::MatrixXd& L) {
    const auto n = L.rows();
    J_ = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)).transpose();
    R_ = Eigen::MatrixXd::Zero(n, n);
  }

  [[nodiscard]] int size() const { return q_; }
  [[nodiscard]] const Eigen::MatrixXd& J() const { return J_; }

  // Primal direction z and dual direction r for constraint normal a.
  void directions(const Eigen::VectorXd& a, Eigen::VectorXd& d, Eigen::VectorXd& z,
                  Eigen::VectorXd& r) const {
    const auto n = J_.rows();
    d = J_.transpose() * a;
    z = J_.rightCols(n - q_) * d.tail(n - q_);
    r = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d.head(q_));
  }

  // Appends a constraint whose transformed normal is d. Returns false when the
  // normal is linearly dependent on the working set.
  bool add(Eigen::VectorXd d) {
    const auto n = static_cast<int>(J_.rows());
    for (int j = n - 1; j > q_; --j) {
      const double h = std::hypot(d(j - 1), d(j));
      if (h == 0.0) continue;
      const double c = d(j - 1) / h;
      const double s = d(j) / h;
      d(j - 1) = h;
      d(j) = 0.0;
      rotate_columns(j - 1, j, c, s);
    }
    if (std::abs(d(q_)) <= std::numeric_limits<double>::epsilon() * std::max(1.0, d.norm())) {
      return false;
    }
    R_.col(q_).head(q_ + 1) = d.head(q_ + 1);
    ++q_;
    return true;
  }

  void remove(int l) {
    for (int k = l; k < q_ - 1; ++k) R_.col(k).head(k + 2) = R_.col(k + 1).head(k + 2);
    R_.col(q_ - 1).setZero();
    for (int j = l; j < q_ - 1; ++j) {
      const double h = std::hypot(R_(j, j), R_(j + 1, j));
      if (h == 0.0) continue;
      const double c = R_(j, j) / h;
      const double s = R_(j + 1, j) / h;
      for (int k = j; k < q_ - 1; ++k) {
        const double t1 = R_(j, k);
        const double t2 = R_(j + 1, k);
        R_(j, k) = c * t1 + s * t2;
        R_(j + 1, k) = -s * t1 + c * t2;
      }
      R_(j + 1, j) = 0.0;
      rotate_columns(j, j + 1, c, s);
    }
    --q_;
  }

 private:
  void rotate_columns(int a, int b, double c, double s) {
    for (Eigen::Index k = 0; k < J_.rows(); ++k) {
      const double t1 = J_(k, a);
      const double t2 = J_(k, b);
      J_(k, a) = c * t1 + s * t2;
      J_(k, b) = -s * t1 + c * t2;
    }
  }

  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  int q_ = 0;
};

}  // namespace

QpSolution solve_qp(const QpProblem& p, const QpOptions& options) {
  validate(p);
  const auto n = p.q.size();
  const auto m = static_cast<int>(p.b.size());

  QpSolution sol;
  sol.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::LLT<Eigen::MatrixXd> llt(p.H);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("qp: Cholesky of H failed");
  sol.u = -llt.solve(p.q);

  WorkingSet ws(llt.matrixL());
  std::vector<int> active;
  std::vector<double> lambda;

  const auto slack = [&](int i) { return p.A.row(i).dot(sol.u) - p.b(i); };
  const auto tolerance = [&](int i) {
    return options.feasibility_tol *
           (1.0 + std::abs(p.b(i)) + p.A.row(i).cwiseAbs().sum() * sol.u.cwiseAbs().maxCoeff());
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Eigen::VectorXd d(n), z(n), r;
  while (true) {
    // Pick the most violated constraint; lowest index wins ties.
    int pick = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      const double s = slack(i);
      if (s < -tolerance(i) && (pick < 0 || s < worst)) {
        pick = i;
        worst = s;
      }
    }
    if (pick < 0) {
      sol.status = QpStatus::kOptimal;
      break;
    }

    const Eigen::VectorXd a = p.A.row(pick).transpose();
    double s_pick = worst;
    double lambda_pick = 0.0;
    bool added = false;
    while (!added) {
      if (++sol.iterations > options.max_iterations) {
        sol.status = QpStatus::kMaxIterations;
        sol.active_set = active;
        for (std::size_t j = 0; j < active.size(); ++j) sol.multipliers(active[j]) = lambda[j];
        return sol;
      }
      ws.directions(a, d, z, r);

      double t_dual = kInf;
      int drop = -1;
      for (int j = 0; j < ws.size(); ++j) {
        if (r(j) > 0.0) {
          const double ratio = lambda[j] / r(j);
          if (ratio < t_dual) {
            t_dual = ratio;
            drop = j;
          }
        }
      }
      const double curvature = z.dot(a);
      const bool has_primal = z.norm() > 1e-14 * std::max(1.0, a.norm()) && curvature > 0.0;
      const double t_primal = has_primal ? -s_pick / curvature : kInf;
      const double t = std::min(t_dual, t_primal);

      if (t == kInf) {
        sol.status = QpStatus::kInfeasible;
        sol.active_set = active;
        for (std::size_t j = 0; j < active.size(); ++j) sol.multipliers(active[j]) = lambda[j];
        return sol;
      }

      for (int j = 0; j < ws.size(); ++j) lambda[j] -= t * r(j);
      lambda_pick += t;

      if (has_primal) {
        sol.u += t * z;
        s_pick = a.dot(sol.u) - p.b(pick);
      }

      if (has_primal && t_primal <= t_dual) {
        if (!ws.add(d)) {
          sol.status = QpStatus::kInfeasible;
          break;
        }
        active.push_back(pick);
        lambda.push_back(lambda_pick);
        added = true;
      } else {
        ws.remove(drop);
        active.erase(active.begin() + drop);
        lambda.erase(lambda.begin() + drop);
      }
    }
    if (!added) break;
  }

  sol.active_set = active;
  for (std::size_t j = 0; j < active.size(); ++j) sol.multipliers(active[j]) = lambda[j];
  return sol;
}

}  // namespace ocbf
