#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace ocbf {

enum class DisturbanceKind { kZero, kConstant, kSinusoidal, kRandom };

const char* to_string(DisturbanceKind kind);
DisturbanceKind disturbance_kind_from_string(const std::string& name);

/// Parameters of a bounded disturbance signal w(t) ∈ ℝᵏ.
///
/// The signal is `scale ⊙ (magnitude · direction(t))` with a unit direction.
/// An empty scale means all ones; with a non-empty scale its largest absolute
/// entry must be ≤ 1, so ‖w(t)‖ ≤ magnitude always.
struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::kZero;
  double magnitude = 0.0;
  Eigen::VectorXd direction;  // constant / sinusoidal
  double frequency = 0.0;     // Hz, sinusoidal
  double phase = 0.0;         // rad, sinusoidal
  double dwell = 0.1;         // s, random
  std::uint64_t seed = 0;     // random
  Eigen::VectorXd scale;

  friend bool operator==(const DisturbanceSpec& a, const DisturbanceSpec& b);
};

class DisturbanceSignal {
 public:
  DisturbanceSignal(DisturbanceSpec spec, int dim);

  [[nodiscard]] Eigen::VectorXd operator()(double t) const;
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const DisturbanceSpec& spec() const { return spec_; }
  /// Supremum of ‖w(t)‖ implied by the construction.
  [[nodiscard]] double bound() const { return spec_.magnitude; }

 private:
  [[nodiscard]] Eigen::VectorXd random_direction(std::int64_t segment) const;

  DisturbanceSpec spec_;
  int dim_;
};

}  // namespace ocbf
