#pragma once

#include "nomamec/model.hpp"

namespace nomamec {

struct OracleResult {
  double best_objective_j = 0.0;
  Allocation best_point;
  int steps_per_dim = 0;
  // Gap bound combining grid-cell curvature at the best cell with the
  // final refinement progress; certifies |candidate - optimum|.
  double resolution_bound_j = 0.0;
  long long evaluations = 0;
};

// Exhaustive reference optimizer for small instances: evaluates the
// objective over a simplex grid in time and box grids in data, then
// refines the best cell by cyclic exact line searches. Independent of the
// closed-form solver path. Refuses more than 3 groups.
OracleResult grid_oracle(const ProblemInstance& instance, int steps_per_dim);

}  // namespace nomamec
