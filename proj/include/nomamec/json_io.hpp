#pragma once

#include <stdexcept>
#include <string>

#include "nomamec/model.hpp"
#include "nomamec/scenario.hpp"

namespace nomamec {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Instance files carry a version tag and the raw physical fields; the
// derived noise-over-gain coefficients are recomputed on load, never
// stored.
std::string instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const std::string& text);

void save_instance(const ProblemInstance& instance, const std::string& path);
ProblemInstance load_instance(const std::string& path);

// Scenario specs load with every field optional; missing fields keep the
// defaults.
ScenarioSpec scenario_from_json(const std::string& text);
ScenarioSpec load_scenario(const std::string& path);

}  // namespace nomamec
