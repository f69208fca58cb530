#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "nomamec/energy.hpp"
#include "nomamec/time_alloc.hpp"

using namespace nomamec;

namespace {

NomaGroup desk_group(double a1, double a2) {
  NomaGroup g;
  g.user1 = test::desk_user(a1);
  g.user2 = test::desk_user(a2);
  g.a1 = a1;
  g.a2 = a2;
  return g;
}

}  // namespace

TEST_CASE("invert_g_prime round-trips through the derivative") {
  const NomaGroup g = desk_group(1.0, 2.0);

  const double t0 = 0.03;
  const double target = g_prime(g, 1.0, 1.0, 1.0, t0);
  CHECK(invert_g_prime(g, 1.0, 1.0, 1.0, target) == doctest::Approx(t0).epsilon(1e-9));

  CHECK(invert_g_prime(g, 1.0, 1.0, 1.0, g_prime(g, 1.0, 1.0, 1.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("invert_g_prime is monotone in the target and rejects non-negative targets") {
  const NomaGroup g = desk_group(0.7, 1.4);
  const double t_low = invert_g_prime(g, 2.0, 1.0, 1.0, -5.0);
  const double t_high = invert_g_prime(g, 2.0, 1.0, 1.0, -0.5);
  CHECK(t_low < t_high);

  CHECK_THROWS_WITH_AS(invert_g_prime(g, 1.0, 1.0, 1.0, 0.0), "target outside range of g'",
                       std::invalid_argument);
  CHECK_THROWS_AS(invert_g_prime(g, 1.0, 1.0, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("solve_time: single group takes the whole budget exactly") {
  auto instance = test::desk_instance({{test::desk_user(1.0), test::desk_user(2.0)}});
  const auto sol = solve_time(instance, {{2.0, 1.0}});
  CHECK(sol.time_s[0] == instance.deadline_s);
  CHECK(sol.alpha ==
        doctest::Approx(-g_prime(instance.groups[0], 2.0, 1.0, 1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("solve_time: identical groups split evenly") {
  auto g = std::make_pair(test::desk_user(1.0), test::desk_user(2.0));
  auto instance = test::desk_instance({g, g});
  const auto sol = solve_time(instance, {{2.0, 1.0}, {2.0, 1.0}});
  CHECK(sol.time_s[0] == sol.time_s[1]);
  CHECK(sol.time_s[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("solve_time: zero data everywhere returns the zero vector") {
  auto g = std::make_pair(test::desk_user(1.0), test::desk_user(2.0));
  auto instance = test::desk_instance({g, g});
  const auto sol = solve_time(instance, {{0.0, 0.0}, {0.0, 0.0}});
  CHECK(sol.alpha == 0.0);
  CHECK(sol.time_s[0] == 0.0);
  CHECK(sol.time_s[1] == 0.0);
}

TEST_CASE("solve_time: groups without payload yield their slot") {
  auto instance = test::desk_instance({{test::desk_user(1.0), test::desk_user(2.0)},
                                       {test::desk_user(0.5), test::desk_user(3.0)}});
  const auto sol = solve_time(instance, {{1.5, 0.5}, {0.0, 0.0}});
  CHECK(sol.time_s[1] == 0.0);
  CHECK(sol.time_s[0] == instance.deadline_s);
}

TEST_CASE("solve_time: asymmetric groups equalize the derivative at -alpha") {
  auto instance = test::desk_instance({{test::desk_user(0.4), test::desk_user(1.1)},
                                       {test::desk_user(1.0), test::desk_user(2.5)}});
  const std::vector<std::array<double, 2>> d{{3.0, 1.0}, {1.0, 0.5}};
  const auto sol = solve_time(instance, d);

  CHECK(sol.time_s[0] + sol.time_s[1] == doctest::Approx(instance.deadline_s).epsilon(1e-9));
  const double g1 = g_prime(instance.groups[0], 3.0, 1.0, 1.0, sol.time_s[0]);
  const double g2 = g_prime(instance.groups[1], 1.0, 0.5, 1.0, sol.time_s[1]);
  CHECK(g1 == doctest::Approx(-sol.alpha).epsilon(1e-8));
  CHECK(g2 == doctest::Approx(-sol.alpha).epsilon(1e-8));

  // cross-check against a fine 1-D scan of the slot split; splits too tight
  // for the payload overflow and count as infinitely expensive
  auto objective = [&](double t1) {
    try {
      return group_offload_energy(instance.groups[0], 3.0, 1.0, t1, 1.0) +
             group_offload_energy(instance.groups[1], 1.0, 0.5, 1.0 - t1, 1.0);
    } catch (const PowerOverflowError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double solver_value = objective(sol.time_s[0]);
  for (int k = 1; k < 2000; ++k) CHECK(solver_value <= objective(k / 2000.0) + 1e-12);
}

TEST_CASE("solve_time: total demand shrinks as alpha grows") {
  auto instance = test::desk_instance({{test::desk_user(0.4), test::desk_user(1.1)},
                                       {test::desk_user(1.0), test::desk_user(2.5)},
                                       {test::desk_user(0.8), test::desk_user(0.9)}});
  const std::vector<std::array<double, 2>> d{{3.0, 1.0}, {1.0, 0.5}, {2.0, 2.0}};
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {0.5, 1.0, 2.0, 4.0, 8.0, 32.0}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      sum += invert_g_prime(instance.groups[i], d[i][0], d[i][1], 1.0, -alpha);
    CHECK(sum < previous);
    previous = sum;
  }
}

TEST_CASE("solve_time beats random feasible splits and survives pair perturbation") {
  rng::SplitMix64 gen(31);
  const auto instance = test::small_scenario_instance(8, 77);
  const std::size_t n = instance.group_count();
  std::vector<std::array<double, 2>> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NomaGroup& g = instance.groups[i];
    d[i] = {0.5 * g.user1.data_bits, 0.5 * g.user2.data_bits};
  }
  const auto sol = solve_time(instance, d);
  double t_sum = 0.0;
  for (double t : sol.time_s) t_sum += t;
  CHECK(t_sum == doctest::Approx(instance.deadline_s).epsilon(1e-9));

  const double value = total_objective(instance, {sol.time_s, d});

  // random feasible splits never do better
  for (int trial = 0; trial < 100; ++trial) {
    Allocation candidate{std::vector<double>(n, 0.0), d};
    double remaining = instance.deadline_s;
    for (std::size_t i = 0; i < n; ++i) {
      const double share = (i + 1 == n) ? remaining : remaining * gen.uniform(0.1, 0.9);
      candidate.time_s[i] = share;
      remaining -= share;
    }
    CHECK(value <= total_objective(instance, candidate) * (1.0 + 1e-12));
  }

  // discrete stationarity: moving budget between any pair never helps
  const double delta = 1e-6 * instance.deadline_s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || sol.time_s[j] < delta) continue;
      Allocation perturbed{sol.time_s, d};
      perturbed.time_s[i] += delta;
      perturbed.time_s[j] -= delta;
      CHECK(total_objective(instance, perturbed) >= value - 1e-10);
    }
  }
}
