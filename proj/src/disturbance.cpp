#include "ocbf/disturbance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ocbf {

const char* to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::kZero: return "zero";
    case DisturbanceKind::kConstant: return "constant";
    case DisturbanceKind::kSinusoidal: return "sinusoidal";
    case DisturbanceKind::kRandom: return "random";
  }
  return "zero";
}

DisturbanceKind disturbance_kind_from_string(const std::string& name) {
  if (name == "zero") return DisturbanceKind::kZero;
  if (name == "constant") return DisturbanceKind::kConstant;
  if (name == "sinusoidal") return DisturbanceKind::kSinusoidal;
  if (name == "random") return DisturbanceKind::kRandom;
  throw std::invalid_argument("unknown disturbance kind '" + name + "'");
}

bool operator==(const DisturbanceSpec& a, const DisturbanceSpec& b) {
  return a.kind == b.kind && a.magnitude == b.magnitude && a.direction.size() == b.direction.size() &&
         a.direction == b.direction && a.frequency == b.frequency && a.phase == b.phase &&
         a.dwell == b.dwell && a.seed == b.seed && a.scale.size() == b.scale.size() &&
         a.scale == b.scale;
}

DisturbanceSignal::DisturbanceSignal(DisturbanceSpec spec, int dim)
    : spec_(std::move(spec)), dim_(dim) {
  if (!(spec_.magnitude >= 0.0)) throw std::invalid_argument("disturbance: negative magnitude");
  if (spec_.scale.size() != 0) {
    if (spec_.scale.size() != dim) throw std::invalid_argument("disturbance: scale size mismatch");
    if (spec_.scale.cwiseAbs().maxCoeff() > 1.0) {
      throw std::invalid_argument("disturbance: scale entries must lie in [-1, 1]");
    }
  }
  if (spec_.kind == DisturbanceKind::kConstant || spec_.kind == DisturbanceKind::kSinusoidal) {
    if (spec_.direction.size() != dim) {
      throw std::invalid_argument("disturbance: direction must have " + std::to_string(dim) +
                                  " entries");
    }
    const double norm = spec_.direction.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("disturbance: zero direction");
    spec_.direction /= norm;
  }
  if (spec_.kind == DisturbanceKind::kRandom && !(spec_.dwell > 0.0)) {
    throw std::invalid_argument("disturbance: dwell must be positive");
  }
}

Eigen::VectorXd DisturbanceSignal::random_direction(std::int64_t segment) const {
  // Counter-based splitmix64 stream keyed on (seed, segment): random access in
  // t without re-seeding a large engine at every RK4 stage.
  std::uint64_t state = spec_.seed ^ (static_cast<std::uint64_t>(segment) * 0xD1B54A32D192ED03ULL);
  const auto next = [&state] {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  const auto uniform = [&next] { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::VectorXd dir(dim_);
  do {
    // Box–Muller so results do not depend on the standard library's normal_distribution.
    for (int i = 0; i < dim_; ++i) {
      const double r = std::sqrt(-2.0 * std::log(uniform()));
      dir(i) = r * std::cos(2.0 * std::numbers::pi * uniform());
    }
  } while (dir.norm() == 0.0);
  return dir / dir.norm();
}

Eigen::VectorXd DisturbanceSignal::operator()(double t) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim_);
  switch (spec_.kind) {
    case DisturbanceKind::kZero:
      return w;
    case DisturbanceKind::kConstant:
      w = spec_.magnitude * spec_.direction;
      break;
    case DisturbanceKind::kSinusoidal:
      w = spec_.magnitude *
          std::sin(2.0 * std::numbers::pi * spec_.frequency * t + spec_.phase) * spec_.direction;
      break;
    case DisturbanceKind::kRandom: {
      const auto segment = static_cast<std::int64_t>(std::floor(t / spec_.dwell));
      w = spec_.magnitude * random_direction(segment);
      break;
    }
  }
  if (spec_.scale.size() != 0) w = w.cwiseProduct(spec_.scale);
  return w;
}

}  // namespace ocbf
