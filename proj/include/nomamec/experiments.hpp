#pragma once

#include <string>
#include <vector>

#include "nomamec/scenario.hpp"
#include "nomamec/solver.hpp"

namespace nomamec {

// Convergence traces of the solver on one network under several cloud
// capacities. CSV columns: F,iteration,objective_joules.
struct ConvergeConfig {
  ScenarioSpec scenario;
  std::vector<double> cloud_capacities;
  SolveOptions options;
};
std::string run_convergence(const ConvergeConfig& config);

enum class SweepVariable { kDeadlineT, kCloudF };
enum class Scheme { kProposed, kEqual, kOma };

std::string to_string(SweepVariable variable);
std::string to_string(Scheme scheme);

// Mean total energy per (value, scheme), averaged over n_instances seeded
// networks shared across schemes and values (paired comparison). CSV
// columns: variable,value,scheme,mean_energy_j,n.
struct SweepSpec {
  SweepVariable variable = SweepVariable::kDeadlineT;
  std::vector<double> values;  // strictly increasing
  int n_instances = 1;
  std::uint64_t seed = 0;
  std::vector<Scheme> schemes = {Scheme::kProposed, Scheme::kEqual, Scheme::kOma};
  ScenarioSpec scenario;
  SolveOptions options;
};

struct SweepRow {
  SweepVariable variable;
  double value;
  Scheme scheme;
  double mean_energy_j;
  int n;
};

struct SweepOutput {
  std::vector<SweepRow> rows;  // ordered by (value, scheme)
  std::string csv;
};

SweepOutput run_sweep(const SweepSpec& spec);

}  // namespace nomamec
