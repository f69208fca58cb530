#pragma once

#include <string>
#include <vector>

#include "nomamec/data_alloc.hpp"
#include "nomamec/energy.hpp"
#include "nomamec/model.hpp"
#include "nomamec/time_alloc.hpp"

namespace nomamec {

struct SolveOptions {
  double xi = 1e-4;          // relative objective-change tolerance
  int max_iterations = 100;
  // When positive, the objective-change stop must also present a KKT
  // residual at or below this value; otherwise the alternation continues
  // (bounded by max_iterations). Used by certification runs.
  double kkt_target = 0.0;
};

enum class Termination { kConverged, kMaxIterations };

struct SolveTrace {
  // Entry 0 is the initial point; entry l the state after iteration l.
  std::vector<double> objective_j;
  std::vector<double> alpha;  // alpha[0] == 0
  std::vector<double> beta;   // beta[0] == 0
  // Objective after each time half-step, before the matching data step.
  // Carries one extra entry for the closing slot refresh.
  std::vector<double> half_step_objective_j;
  // Slot price consistent with the returned allocation (from the closing
  // time half-step); this is the multiplier the certificate uses.
  double final_alpha = 0.0;
  double kkt_residual = 0.0;
  Termination termination = Termination::kConverged;
  double wall_time_s = 0.0;

  int iterations() const { return static_cast<int>(objective_j.size()) - 1; }
};

struct SolveResult {
  Allocation allocation;
  EnergyReport report;
  SolveTrace trace;
};

// Alternates exact time and data minimizations from the mandatory-offload
// start until the relative objective change drops below xi, then certifies
// the result with a KKT residual. Throws InfeasibleError when validation
// fails.
SolveResult solve(const ProblemInstance& instance, const SolveOptions& options = {});

// Scale-free first-order optimality measure at (alloc, alpha, beta):
// stationarity of interior coordinates, sign violations of clamped ones,
// and complementary slackness of the two coupled constraints. Small values
// certify a global optimum of the convex program.
double kkt_residual(const ProblemInstance& instance, const Allocation& alloc, double alpha,
                    double beta);

// CSV with header "iteration,objective_joules,alpha,beta"; row 0 is the
// initial point.
std::string trace_to_csv(const SolveTrace& trace);

}  // namespace nomamec
