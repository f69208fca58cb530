#include "nomamec/baselines.hpp"

#include <chrono>
#include <limits>

namespace nomamec {

SolveResult equal_resource_solve(const ProblemInstance& instance) {
  const auto start = std::chrono::steady_clock::now();
  const ValidationReport validation = validate_instance(instance);
  if (!validation.ok())
    throw InfeasibleError("instance rejected:\n" + validation.to_string());

  const std::size_t n = instance.group_count();
  std::vector<double> t(n, instance.deadline_s / static_cast<double>(n));
  const DataSolution ds = solve_data(instance, t);

  SolveResult result;
  result.allocation = {t, ds.data_bits};
  result.report = energy_report(instance, result.allocation);
  result.trace.objective_j = {result.report.total_j};
  result.trace.alpha = {0.0};
  result.trace.beta = {ds.beta};
  result.trace.kkt_residual = std::numeric_limits<double>::quiet_NaN();
  result.trace.termination = Termination::kConverged;
  result.trace.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ProblemInstance make_oma_instance(const ProblemInstance& instance) {
  std::vector<std::pair<UserProfile, UserProfile>> pairs;
  pairs.reserve(2 * instance.group_count());
  for (const NomaGroup& g : instance.groups) {
    for (int j = 0; j < 2; ++j) {
      const UserProfile& u = g.user(j);
      UserProfile placeholder;
      placeholder.data_bits = 0.0;
      placeholder.cycles_per_bit = 1.0;
      placeholder.energy_per_cycle_j = 0.0;
      placeholder.local_capacity_cycles_per_s = 1.0;
      placeholder.channel_gain = u.channel_gain;  // keeps the ordering invariant
      pairs.emplace_back(u, placeholder);
    }
  }
  return make_instance(std::move(pairs), instance.bandwidth_hz, instance.noise_psd_w_per_hz,
                       instance.deadline_s, instance.cloud_capacity_cycles);
}

SolveResult oma_solve(const ProblemInstance& instance, const SolveOptions& options) {
  return solve(make_oma_instance(instance), options);
}

}  // namespace nomamec
