#pragma once

// Closed real intervals with the operations needed to enclose barrier and
// vector-field expressions over a box. Rounding is round-to-nearest; callers
// compare against enclosures with a 1e-9 slack, far above accumulated ulps.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ocbf {

class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double v) : lo_(v), hi_(v) {}  // NOLINT: implicit by intent
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("interval: lo > hi");
  }

  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] double mid() const { return 0.5 * (lo_ + hi_); }
  [[nodiscard]] double width() const { return hi_ - lo_; }
  [[nodiscard]] double radius() const { return 0.5 * (hi_ - lo_); }
  [[nodiscard]] double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }
  [[nodiscard]] bool contains(double v) const { return lo_ <= v && v <= hi_; }
  [[nodiscard]] bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
  }
  friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo_ * b.lo_;
    const double p2 = a.lo_ * b.hi_;
    const double p3 = a.hi_ * b.lo_;
    const double p4 = a.hi_ * b.hi_;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains(0.0)) throw std::domain_error("interval: division by an interval containing 0");
    return a * Interval(1.0 / b.hi_, 1.0 / b.lo_);
  }
  friend bool operator==(const Interval& a, const Interval& b) = default;

  friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
    return os << '[' << iv.lo_ << ", " << iv.hi_ << ']';
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

inline Interval sqr(const Interval& a) {
  if (a.lo() >= 0.0) return {a.lo() * a.lo(), a.hi() * a.hi()};
  if (a.hi() <= 0.0) return {a.hi() * a.hi(), a.lo() * a.lo()};
  return {0.0, std::max(a.lo() * a.lo(), a.hi() * a.hi())};
}

inline Interval sqrt(const Interval& a) {
  if (a.hi() < 0.0) throw std::domain_error("interval: sqrt of a negative interval");
  return {std::sqrt(std::max(a.lo(), 0.0)), std::sqrt(a.hi())};
}

inline Interval exp(const Interval& a) { return {std::exp(a.lo()), std::exp(a.hi())}; }

inline Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return {0.0, a.mag()};
}

inline Interval cos(const Interval& a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (a.width() >= kTwoPi) return {-1.0, 1.0};
  double lo = std::min(std::cos(a.lo()), std::cos(a.hi()));
  double hi = std::max(std::cos(a.lo()), std::cos(a.hi()));
  // Maxima at 2kπ, minima at (2k+1)π.
  const double k_max = std::ceil(a.lo() / kTwoPi);
  if (k_max * kTwoPi <= a.hi()) hi = 1.0;
  const double k_min = std::ceil((a.lo() - std::numbers::pi) / kTwoPi);
  if (k_min * kTwoPi + std::numbers::pi <= a.hi()) lo = -1.0;
  return {lo, hi};
}

inline Interval sin(const Interval& a) {
  return cos(a - Interval(0.5 * std::numbers::pi));
}

using IntervalVector = std::vector<Interval>;

/// Dense row-major interval matrix; only what the bound computations need.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(Eigen::Index rows, Eigen::Index cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}
  explicit IntervalMatrix(const Eigen::MatrixXd& m) : IntervalMatrix(m.rows(), m.cols()) {
    for (Eigen::Index i = 0; i < rows_; ++i)
      for (Eigen::Index j = 0; j < cols_; ++j) (*this)(i, j) = m(i, j);
  }

  [[nodiscard]] Eigen::Index rows() const { return rows_; }
  [[nodiscard]] Eigen::Index cols() const { return cols_; }
  Interval& operator()(Eigen::Index i, Eigen::Index j) {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }
  const Interval& operator()(Eigen::Index i, Eigen::Index j) const {
    return data_[static_cast<std::size_t>(i * cols_ + j)];
  }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Interval> data_;
};

inline Interval dot(const IntervalVector& a, const IntervalVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("interval dot: size mismatch");
  Interval acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Row vector times matrix: (aᵀ M)_j.
inline IntervalVector row_times(const IntervalVector& a, const IntervalMatrix& m) {
  if (static_cast<Eigen::Index>(a.size()) != m.rows()) {
    throw std::invalid_argument("interval row_times: size mismatch");
  }
  IntervalVector out(static_cast<std::size_t>(m.cols()), Interval(0.0));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[j] += a[i] * m(i, j);
  return out;
}

/// Enclosure of the Euclidean norm of a vector ranging over a box.
inline Interval norm(const IntervalVector& a) {
  Interval acc(0.0);
  for (const auto& v : a) acc += sqr(v);
  return sqrt(acc);
}

}  // namespace ocbf
