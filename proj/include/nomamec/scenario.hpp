#pragma once

#include <cstdint>

#include "nomamec/model.hpp"

namespace nomamec {

enum class Pairing { kSortedExtremes, kRandom };

// Simulation setup: cellular deployment with log-distance path loss
// 128.1 + 37.6*log10(d_km) dB plus log-normal shadowing, uniform workload
// draws, and channel-sorted pairing. Defaults reproduce the reference
// parameter set.
struct ScenarioSpec {
  int n_users = 30;  // even; n_users/2 groups
  double cell_radius_m = 500.0;
  double min_distance_m = 10.0;
  double shadowing_std_db = 4.0;
  double bandwidth_hz = 1e7;
  double noise_psd_dbm_hz = -169.0;
  double r_min_bits = 1e5;
  double r_max_bits = 5e5;
  double c_min_cycles_per_bit = 500.0;
  double c_max_cycles_per_bit = 1500.0;
  double local_capacity_cycles_per_s = 1e9;
  double energy_per_cycle_j = 1e-10;
  double deadline_s = 0.1;
  double cloud_capacity_cycles = 6e9;
  Pairing pairing = Pairing::kSortedExtremes;
  std::uint64_t seed = 0;
};

void check_spec(const ScenarioSpec& spec);  // throws std::invalid_argument

// One deterministic draw from the spec (stream split per user), with no
// feasibility screening. Distinct attempt values give independent draws
// under the same seed.
ProblemInstance generate_raw(const ScenarioSpec& spec, std::uint64_t attempt = 0);

// Deterministic feasible instance: resamples (bounded) until validation
// passes, so every generated instance is solvable as-is.
ProblemInstance generate(const ScenarioSpec& spec);

namespace rng {

// SplitMix64: fixed, portable 64-bit stream. Used directly as the
// generator so results do not depend on the platform's library.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double uniform01();                    // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal, Box-Muller
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b);

}  // namespace rng

}  // namespace nomamec
