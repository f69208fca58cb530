#include "nomamec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace nomamec {

namespace rng {

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 s(a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
  return s.next();
}

}  // namespace rng

void check_spec(const ScenarioSpec& spec) {
  if (spec.n_users < 2 || spec.n_users % 2 != 0)
    throw std::invalid_argument("n_users must be even and >= 2");
  if (!(spec.cell_radius_m >= spec.min_distance_m) || !(spec.min_distance_m > 0.0))
    throw std::invalid_argument("cell geometry must satisfy 0 < min_distance <= radius");
  if (!(spec.shadowing_std_db >= 0.0)) throw std::invalid_argument("shadowing_std_db < 0");
  if (!(spec.bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be positive");
  if (!(spec.r_max_bits >= spec.r_min_bits) || !(spec.r_min_bits >= 0.0))
    throw std::invalid_argument("empty data-size range");
  if (!(spec.c_max_cycles_per_bit >= spec.c_min_cycles_per_bit) ||
      !(spec.c_min_cycles_per_bit > 0.0))
    throw std::invalid_argument("empty cycles-per-bit range");
  if (!(spec.local_capacity_cycles_per_s > 0.0))
    throw std::invalid_argument("local capacity must be positive");
  if (!(spec.energy_per_cycle_j >= 0.0)) throw std::invalid_argument("energy_per_cycle_j < 0");
  if (!(spec.deadline_s > 0.0)) throw std::invalid_argument("deadline_s must be positive");
  if (!(spec.cloud_capacity_cycles >= 0.0))
    throw std::invalid_argument("cloud_capacity_cycles < 0");
}

ProblemInstance generate_raw(const ScenarioSpec& spec, std::uint64_t attempt) {
  check_spec(spec);
  const int n = spec.n_users;
  const std::uint64_t attempt_seed = rng::mix(spec.seed, attempt);

  std::vector<UserProfile> users(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    rng::SplitMix64 stream(rng::mix(attempt_seed, static_cast<std::uint64_t>(u) + 1));
    // Area-uniform distance on the annulus [min_distance, radius].
    const double r2 = stream.uniform(spec.min_distance_m * spec.min_distance_m,
                                     spec.cell_radius_m * spec.cell_radius_m);
    const double dist_km = std::sqrt(r2) / 1000.0;
    const double pathloss_db =
        128.1 + 37.6 * std::log10(dist_km) + spec.shadowing_std_db * stream.normal();
    UserProfile& user = users[static_cast<std::size_t>(u)];
    user.channel_gain = std::pow(10.0, -pathloss_db / 10.0);
    user.data_bits = stream.uniform(spec.r_min_bits, spec.r_max_bits);
    user.cycles_per_bit = stream.uniform(spec.c_min_cycles_per_bit, spec.c_max_cycles_per_bit);
    user.local_capacity_cycles_per_s = spec.local_capacity_cycles_per_s;
    user.energy_per_cycle_j = spec.energy_per_cycle_j;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (spec.pairing == Pairing::kSortedExtremes) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return users[static_cast<std::size_t>(a)].channel_gain >
             users[static_cast<std::size_t>(b)].channel_gain;
    });
  } else {
    rng::SplitMix64 shuffler(rng::mix(attempt_seed, 0xF00Dull));
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffler.next() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }

  std::vector<std::pair<UserProfile, UserProfile>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) / 2);
  for (int k = 0; k < n / 2; ++k) {
    int first, second;
    if (spec.pairing == Pairing::kSortedExtremes) {
      first = order[static_cast<std::size_t>(k)];
      second = order[static_cast<std::size_t>(n - 1 - k)];
    } else {
      first = order[static_cast<std::size_t>(2 * k)];
      second = order[static_cast<std::size_t>(2 * k + 1)];
    }
    const UserProfile& a = users[static_cast<std::size_t>(first)];
    const UserProfile& b = users[static_cast<std::size_t>(second)];
    if (a.channel_gain >= b.channel_gain)
      pairs.emplace_back(a, b);
    else
      pairs.emplace_back(b, a);
  }

  const double noise_w_per_hz = std::pow(10.0, (spec.noise_psd_dbm_hz - 30.0) / 10.0);
  return make_instance(std::move(pairs), spec.bandwidth_hz, noise_w_per_hz, spec.deadline_s,
                       spec.cloud_capacity_cycles);
}

ProblemInstance generate(const ScenarioSpec& spec) {
  constexpr std::uint64_t kMaxAttempts = 1000000;
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ProblemInstance instance = generate_raw(spec, attempt);
    if (validate_instance(instance).ok()) return instance;
  }
  throw std::runtime_error(
      "generate: no feasible draw found; cloud capacity too small for the workload "
      "distribution");
}

}  // namespace nomamec
