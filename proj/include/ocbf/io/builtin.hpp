#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocbf/scenario.hpp"

namespace ocbf::io {

/// Built-in scenarios in a fixed order: the double-integrator and quadrotor
/// comparisons, then stress variants.
const std::vector<Scenario>& builtin_scenarios();

std::optional<Scenario> find_builtin(const std::string& name);

}  // namespace ocbf::io
