#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ocbf/scenario.hpp"

namespace ocbf::io {

/// Parse or validation failure in a scenario file. `line` is 1-based, 0 if unknown.
class ScenarioFileError : public std::runtime_error {
 public:
  ScenarioFileError(int line, const std::string& message, const std::string& source = "");
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  int line_;
  std::string detail_;
};

/// YAML scenario documents. Unknown keys are rejected; doubles are written in
/// shortest round-trip form so parse(serialize(s)) == s.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace ocbf::io
