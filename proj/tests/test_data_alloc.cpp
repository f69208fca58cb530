#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "nomamec/data_alloc.hpp"
#include "nomamec/energy.hpp"

using namespace nomamec;

namespace {

// Group with prescribed prices, boxes, and compute parameters. The
// mandatory floor is dialed in through the local capacity.
NomaGroup make_group(double a1, double a2, double r1, double lo1, double c1, double p1,
                     double r2, double lo2, double c2, double p2, double deadline = 1.0) {
  NomaGroup g;
  g.user1 = test::desk_user(a1, r1, c1, p1);
  g.user2 = test::desk_user(a2, r2, c2, p2);
  g.user1.local_capacity_cycles_per_s = std::max((r1 - lo1) * c1 / deadline, 1e-9);
  g.user2.local_capacity_cycles_per_s = std::max((r2 - lo2) * c2 / deadline, 1e-9);
  g.a1 = a1;
  g.a2 = a2;
  return g;
}

// Per-group objective at capacity price beta: slot energy plus the
// price-adjusted linear data terms. Constant offsets dropped.
double group_cost(const NomaGroup& g, double t, double b, double beta, double d1, double d2) {
  const double bt = b * t;
  return bt * (g.a1 * std::pow(2.0, (d1 + d2) / bt) +
               (g.a2 - g.a1) * std::pow(2.0, d2 / bt) - g.a2) +
         (beta - g.user1.energy_per_cycle_j) * g.user1.cycles_per_bit * d1 +
         (beta - g.user2.energy_per_cycle_j) * g.user2.cycles_per_bit * d2;
}

// First-order certificate for the box minimizer of a smooth convex
// function: interior partials vanish, edge partials point inward.
void check_group_kkt(const NomaGroup& g, double t, double b, double beta,
                     const std::array<double, 2>& d, double deadline) {
  const DataBox box1 = data_box(g.user1, deadline);
  const DataBox box2 = data_box(g.user2, deadline);
  REQUIRE(d[0] >= box1.lo);
  REQUIRE(d[0] <= box1.hi);
  REQUIRE(d[1] >= box2.lo);
  REQUIRE(d[1] <= box2.hi);

  const double bt = b * t;
  const double e_sum = std::pow(2.0, (d[0] + d[1]) / bt);
  const double e_weak = std::pow(2.0, d[1] / bt);
  const double term1 = kLn2 * g.a1 * e_sum;
  const double lin1 = (beta - g.user1.energy_per_cycle_j) * g.user1.cycles_per_bit;
  const double term2 = kLn2 * (g.a2 - g.a1) * e_weak;
  const double lin2 = (beta - g.user2.energy_per_cycle_j) * g.user2.cycles_per_bit;

  const double partial1 = term1 + lin1;
  const double partial2 = term1 + term2 + lin2;
  const double scale1 = term1 + std::abs(lin1) + 1e-300;
  const double scale2 = term1 + term2 + std::abs(lin2) + 1e-300;

  constexpr double tol = 1e-9;
  if (box1.hi > box1.lo) {
    if (d[0] <= box1.lo)
      CHECK(partial1 >= -tol * scale1);
    else if (d[0] >= box1.hi)
      CHECK(partial1 <= tol * scale1);
    else
      CHECK(std::abs(partial1) <= tol * scale1);
  }
  if (box2.hi > box2.lo) {
    if (d[1] <= box2.lo)
      CHECK(partial2 >= -tol * scale2);
    else if (d[1] >= box2.hi)
      CHECK(partial2 <= tol * scale2);
    else
      CHECK(std::abs(partial2) <= tol * scale2);
  }
}

}  // namespace

TEST_CASE("d1_of_beta and d2_of_beta closed forms at the reference point") {
  // a1=1, a2=2, C1=C2=1, P1=1, P2=2, boxes [0,10]
  const NomaGroup g = make_group(1.0, 2.0, 10.0, 0.0, 1.0, 1.0, 10.0, 0.0, 1.0, 2.0);
  CHECK(d1_of_beta(g, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d2_of_beta(g, 1.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(std::log2(1.0 / kLn2)).epsilon(1e-12));
  CHECK(d2_of_beta(g, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.5287663729448977).epsilon(1e-12));
}

TEST_CASE("d1_of_beta clamps when the formula leaves the reals or the box") {
  const NomaGroup g = make_group(1.0, 2.0, 10.0, 2.0, 1.0, 1.0, 10.0, 0.0, 1.0, 2.0);
  // beta == P1 kills the numerator: lower clamp.
  CHECK(d1_of_beta(g, 1.0, 1.0, 1.0, 1.0) == 2.0);

  // Huge payoff for user1: unclamped value far above the box.
  const NomaGroup rich = make_group(1e-6, 2e-6, 3.0, 0.0, 1.0, 10.0, 3.0, 0.0, 1.0, 1.0);
  CHECK(d1_of_beta(rich, 1.0, 1.0, 0.0, 1.0) == 3.0);

  CHECK_THROWS_AS(
      d1_of_beta(make_group(1.0, 1.0, 5.0, 0.0, 1.0, 1.0, 5.0, 0.0, 1.0, 1.0), 1.0, 1.0, 0.0,
                 1.0),
      std::invalid_argument);
}

TEST_CASE("d2_of_beta: unit argument lands on the lower clamp, equal cycle counts freeze it") {
  // Arrange k2 = ln2*(a2-a1) so the log argument is exactly 1.
  const double k2_target = kLn2 * 1.0;
  // with C1 == C2 == 1: k2 = P2 - P1, so pick P2 = P1 + ln2
  const NomaGroup g = make_group(1.0, 2.0, 10.0, 0.0, 1.0, 1.0, 10.0, 1.5, 1.0, 1.0 + k2_target);
  CHECK(d2_of_beta(g, 1.0, 1.0, 0.0, 1.0) == 1.5);  // log2(1) = 0 clamps up to the floor

  // C1 == C2 makes the value independent of beta.
  const NomaGroup same_c = make_group(0.5, 1.5, 10.0, 0.0, 2.0, 1.0, 10.0, 0.0, 2.0, 3.0);
  const double at0 = d2_of_beta(same_c, 1.0, 1.0, 0.0, 1.0);
  for (double beta : {0.1, 0.5, 2.0, 10.0})
    CHECK(d2_of_beta(same_c, 1.0, 1.0, beta, 1.0) == doctest::Approx(at0).epsilon(1e-12));
}

TEST_CASE("optimal_group_data satisfies the box KKT conditions on random groups") {
  rng::SplitMix64 gen(41);
  int exercised_edges = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const double a1 = gen.uniform(0.02, 2.0);
    const bool degenerate = trial % 7 == 0;
    const double a2 = degenerate ? a1 : a1 * gen.uniform(1.0001, 5.0);
    const double r1 = gen.uniform(0.0, 10.0);
    const double r2 = gen.uniform(0.0, 10.0);
    const double lo1 = (trial % 3 == 0) ? gen.uniform(0.0, r1) : 0.0;
    const double lo2 = (trial % 5 == 0) ? gen.uniform(0.0, r2) : 0.0;
    const NomaGroup g = make_group(a1, a2, r1, lo1, gen.uniform(0.5, 2.0),
                                   gen.uniform(0.2, 3.0), r2, lo2, gen.uniform(0.5, 2.0),
                                   gen.uniform(0.2, 3.0));
    const double t = gen.uniform(0.1, 3.0);
    const double b = gen.uniform(0.5, 2.0);
    const double beta = (trial % 2 == 0) ? 0.0 : gen.uniform(0.0, 4.0);

    const auto d = optimal_group_data(g, t, b, beta, 1.0);
    check_group_kkt(g, t, b, beta, d, 1.0);

    const DataBox b1 = data_box(g.user1, 1.0);
    const DataBox b2 = data_box(g.user2, 1.0);
    if (d[0] == b1.lo || d[0] == b1.hi || d[1] == b2.lo || d[1] == b2.hi) ++exercised_edges;

    // dominance over a coarse grid of the same box
    const double value = group_cost(g, t, b, beta, d[0], d[1]);
    if (trial % 10 == 0) {
      for (int x = 0; x <= 24; ++x) {
        for (int y = 0; y <= 24; ++y) {
          const double dx = b1.lo + (b1.hi - b1.lo) * x / 24.0;
          const double dy = b2.lo + (b2.hi - b2.lo) * y / 24.0;
          CHECK(value <= group_cost(g, t, b, beta, dx, dy) + 1e-9 * (std::abs(value) + 1.0));
        }
      }
    }
  }
  CHECK(exercised_edges > 100);  // the sweep must hit coupled-clamp territory
}

TEST_CASE("optimal_group_data agrees with the closed forms when both are interior") {
  const NomaGroup g = make_group(1.0, 2.0, 10.0, 0.0, 1.0, 1.0, 10.0, 0.0, 1.0, 2.0);
  const auto d = optimal_group_data(g, 1.0, 1.0, 0.0, 1.0);
  CHECK(d[1] == doctest::Approx(d2_of_beta(g, 1.0, 1.0, 0.0, 1.0)).epsilon(1e-12));
  // d1 sits on its lower bound here (formula value 0); both agree
  CHECK(d[0] == doctest::Approx(d1_of_beta(g, 1.0, 1.0, 0.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("cloud_load limits: price ceiling yields the floors, empty boxes yield zero") {
  auto instance = test::desk_instance(
      {{test::desk_user(0.5, 8.0, 1.0, 2.0), test::desk_user(1.5, 6.0, 2.0, 1.0)}});
  const std::vector<double> t{1.0};

  double floors = 0.0;
  for (int j = 0; j < 2; ++j) {
    const UserProfile& u = instance.groups[0].user(j);
    floors += min_offload_bits(u, instance.deadline_s) * u.cycles_per_bit;
  }
  CHECK(cloud_load(instance, t, 1e9) == doctest::Approx(floors).epsilon(1e-12));

  auto empty = test::desk_instance(
      {{test::desk_user(0.5, 0.0, 1.0, 2.0), test::desk_user(1.5, 0.0, 2.0, 1.0)}});
  for (double beta : {0.0, 0.3, 7.0}) CHECK(cloud_load(empty, t, beta) == 0.0);
}

TEST_CASE("cloud_load is non-increasing in beta") {
  rng::SplitMix64 gen(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto instance = test::small_scenario_instance(6, 1000 + trial);
    const std::vector<double> t(3, instance.deadline_s / 3.0);
    double previous = std::numeric_limits<double>::infinity();
    for (double beta :
         {0.0, 1e-12, 5e-12, 1e-11, 3e-11, 6e-11, 1e-10, 2e-10, 1e-9}) {
      const double load = cloud_load(instance, t, beta);
      CHECK(load <= previous * (1.0 + 1e-12));
      previous = load;
    }
  }
}

TEST_CASE("solve_data: ample capacity keeps beta at zero") {
  const auto instance = test::desk_instance(
      {{test::desk_user(0.5, 8.0, 1.0, 2.0), test::desk_user(1.5, 6.0, 2.0, 1.0)}});
  const auto sol = solve_data(instance, {1.0});
  CHECK(sol.beta == 0.0);
  const auto direct =
      optimal_group_data(instance.groups[0], 1.0, 1.0, 0.0, instance.deadline_s);
  CHECK(sol.data_bits[0][0] == direct[0]);
  CHECK(sol.data_bits[0][1] == direct[1]);
}

TEST_CASE("solve_data: capacity pinched to the floors") {
  // lo1 = 3, lo2 = 2, capacity exactly the mandatory load
  const NomaGroup g = make_group(1.0, 2.0, 8.0, 3.0, 1.0, 2.0, 6.0, 2.0, 1.0, 1.0);
  auto instance = test::desk_instance({{g.user1, g.user2}}, 1.0, 1.0, /*capacity=*/5.0);
  const auto sol = solve_data(instance, {1.0});
  CHECK(sol.data_bits[0][0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.data_bits[0][1] == doctest::Approx(2.0).epsilon(1e-9));
  const double load = sol.data_bits[0][0] + sol.data_bits[0][1];
  CHECK(std::abs(load - 5.0) <= 1e-6 * 5.0);  // complementary slackness at the pinch
}

TEST_CASE("solve_data: binding capacity meets the budget and beats a filtered grid") {
  // cheap channels: the unpriced optimum wants nearly everything offloaded
  const NomaGroup g1 = make_group(2e-4, 6e-4, 8.0, 0.0, 1.0, 2.0, 7.0, 0.0, 1.5, 1.5);
  const NomaGroup g2 = make_group(4e-4, 1.2e-3, 9.0, 0.0, 0.8, 1.7, 5.0, 0.0, 1.2, 2.2);
  auto instance = test::desk_instance({{g1.user1, g1.user2}, {g2.user1, g2.user2}}, 1.0, 1.0,
                                      /*capacity=*/14.0);
  // generous local capacity: floors are zero, but the unpriced optimum
  // wants nearly everything offloaded, well above capacity
  const std::vector<double> t{0.55, 0.45};
  REQUIRE(cloud_load(instance, t, 0.0) > instance.cloud_capacity_cycles);

  const auto sol = solve_data(instance, t);
  CHECK(sol.beta > 0.0);
  double load = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      load += sol.data_bits[i][static_cast<std::size_t>(j)] *
              instance.groups[i].user(j).cycles_per_bit;
  CHECK(std::abs(load - 14.0) <= 1e-6 * 14.0);

  const double value = total_objective(instance, {t, sol.data_bits});
  // exhaustive filtered grid over the 4-D data box
  const int steps = 28;
  double best_grid = std::numeric_limits<double>::infinity();
  for (int x1 = 0; x1 <= steps; ++x1)
    for (int y1 = 0; y1 <= steps; ++y1)
      for (int x2 = 0; x2 <= steps; ++x2)
        for (int y2 = 0; y2 <= steps; ++y2) {
          Allocation candidate{t,
                               {{8.0 * x1 / steps, 7.0 * y1 / steps},
                                {9.0 * x2 / steps, 5.0 * y2 / steps}}};
          double cand_load = 0.0;
          for (std::size_t i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              cand_load += candidate.data_bits[i][static_cast<std::size_t>(j)] *
                           instance.groups[i].user(j).cycles_per_bit;
          if (cand_load > 14.0) continue;
          best_grid = std::min(best_grid, total_objective(instance, candidate));
        }
  CHECK(value <= best_grid + 1e-9);
}

TEST_CASE("solve_data improves on random feasible data and respects the boxes exactly") {
  rng::SplitMix64 gen(47);
  const auto instance = test::small_scenario_instance(6, 2024, /*capacity=*/2e9);
  const std::size_t n = instance.group_count();
  const std::vector<double> t(n, instance.deadline_s / static_cast<double>(n));
  const auto sol = solve_data(instance, t);

  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) {
      const DataBox box = data_box(instance.groups[i].user(j), instance.deadline_s);
      const double d = sol.data_bits[i][static_cast<std::size_t>(j)];
      CHECK(d >= box.lo);
      CHECK(d <= box.hi);
    }

  const double value = total_objective(instance, {t, sol.data_bits});
  for (int trial = 0; trial < 100; ++trial) {
    auto candidate = test::random_feasible(instance, gen);
    candidate.time_s = t;
    CHECK(value <= total_objective(instance, candidate) * (1.0 + 1e-12));
  }
}

TEST_CASE("solve_data rejects groups that must offload but have no slot") {
  const NomaGroup g = make_group(1.0, 2.0, 8.0, 3.0, 1.0, 2.0, 6.0, 0.0, 1.0, 1.0);
  auto instance = test::desk_instance({{g.user1, g.user2}, {g.user1, g.user2}});
  CHECK_THROWS_WITH_AS(solve_data(instance, {0.0, 1.0}),
                       "group needs offload but has no time (group 0)", std::invalid_argument);

  // zero-floor groups without a slot are simply pinned at zero
  const NomaGroup free_g = make_group(1.0, 2.0, 8.0, 0.0, 1.0, 2.0, 6.0, 0.0, 1.0, 1.0);
  auto ok_instance = test::desk_instance({{free_g.user1, free_g.user2},
                                          {free_g.user1, free_g.user2}});
  const auto sol = solve_data(ok_instance, {0.0, 1.0});
  CHECK(sol.data_bits[0][0] == 0.0);
  CHECK(sol.data_bits[0][1] == 0.0);
}

TEST_CASE("degenerate groups: collapsed problem fills the pricier local computation first") {
  // equal gains; user1 has the larger P*C, so the payload goes to user1 first
  const NomaGroup g = make_group(1.0, 1.0, 6.0, 0.0, 1.0, 3.0, 6.0, 0.0, 1.0, 1.0);
  auto instance = test::desk_instance({{g.user1, g.user2}});
  const auto sol = solve_data(instance, {1.0});
  check_group_kkt(g, 1.0, 1.0, 0.0, sol.data_bits[0], 1.0);
  CHECK(sol.data_bits[0][0] > 0.0);
  // user2's bits stay at zero until user1 saturates
  if (sol.data_bits[0][0] < 6.0) CHECK(sol.data_bits[0][1] == 0.0);

  // brute force the collapsed box as a final guard
  const double value = group_cost(g, 1.0, 1.0, 0.0, sol.data_bits[0][0], sol.data_bits[0][1]);
  for (int x = 0; x <= 60; ++x)
    for (int y = 0; y <= 60; ++y)
      CHECK(value <=
            group_cost(g, 1.0, 1.0, 0.0, 6.0 * x / 60.0, 6.0 * y / 60.0) + 1e-9);
}
