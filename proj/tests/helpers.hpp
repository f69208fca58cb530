#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "nomamec/model.hpp"
#include "nomamec/scenario.hpp"

namespace nomamec::test {

// Unit-scale group with chosen noise-over-gain prices; sigma2 is fixed at 1
// so channel_gain = 1/a.
inline UserProfile desk_user(double a, double data_bits = 10.0, double cycles_per_bit = 1.0,
                             double energy_per_cycle = 1.0, double local_capacity = 1e12) {
  UserProfile u;
  u.data_bits = data_bits;
  u.cycles_per_bit = cycles_per_bit;
  u.energy_per_cycle_j = energy_per_cycle;
  u.local_capacity_cycles_per_s = local_capacity;  // large: no mandatory offload
  u.channel_gain = 1.0 / a;
  return u;
}

inline ProblemInstance desk_instance(std::vector<std::pair<UserProfile, UserProfile>> pairs,
                                     double bandwidth = 1.0, double deadline = 1.0,
                                     double capacity = 1e18) {
  return make_instance(std::move(pairs), bandwidth, 1.0, deadline, capacity);
}

// Small reference-parameter network, resampled to feasibility.
inline ProblemInstance small_scenario_instance(int n_users, std::uint64_t seed,
                                               double capacity = 6e9) {
  ScenarioSpec spec;
  spec.n_users = n_users;
  spec.seed = seed;
  spec.cloud_capacity_cycles = capacity;
  return generate(spec);
}

// Random feasible allocation: uniform stick-breaking times over the budget
// and box-uniform data, scaled back towards the floors until the cloud
// constraint holds.
inline Allocation random_feasible(const ProblemInstance& instance, rng::SplitMix64& gen) {
  const std::size_t n = instance.group_count();
  Allocation alloc;
  alloc.time_s.resize(n);
  alloc.data_bits.resize(n);
  double remaining = instance.deadline_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = (i + 1 == n) ? remaining : remaining * gen.uniform(0.2, 0.8);
    alloc.time_s[i] = share;
    remaining -= share;
  }
  double floor_load = 0.0;
  double extra_load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      const UserProfile& u = instance.groups[i].user(j);
      const double lo = min_offload_bits(u, instance.deadline_s);
      const double d = gen.uniform(lo, u.data_bits);
      alloc.data_bits[i][static_cast<std::size_t>(j)] = d;
      floor_load += lo * u.cycles_per_bit;
      extra_load += (d - lo) * u.cycles_per_bit;
    }
  }
  const double cap = instance.cloud_capacity_cycles;
  if (floor_load + extra_load > cap && extra_load > 0.0) {
    const double scale = std::max(0.0, (cap - floor_load) / extra_load) * 0.999;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) {
        const UserProfile& u = instance.groups[i].user(j);
        const double lo = min_offload_bits(u, instance.deadline_s);
        auto& d = alloc.data_bits[i][static_cast<std::size_t>(j)];
        d = lo + (d - lo) * scale;
      }
  }
  return alloc;
}

}  // namespace nomamec::test
