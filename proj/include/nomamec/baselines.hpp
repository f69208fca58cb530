#pragma once

#include "nomamec/model.hpp"
#include "nomamec/solver.hpp"

namespace nomamec {

// Equal slots for every group, data still optimized. The kkt_residual of
// the returned trace is NaN: the point is generally not stationary.
SolveResult equal_resource_solve(const ProblemInstance& instance);

// Rewrites the network as one slot per user: each user becomes the strong
// member of its own group, paired with a silent placeholder (zero workload,
// mirrored channel). The group energy then collapses to the single-carrier
// form B*t*a*(2^(d/(B*t)) - 1).
ProblemInstance make_oma_instance(const ProblemInstance& instance);

// Time-division baseline: the full solver run on the per-user rewrite.
SolveResult oma_solve(const ProblemInstance& instance, const SolveOptions& options = {});

}  // namespace nomamec
