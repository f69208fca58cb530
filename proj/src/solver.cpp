#include "nomamec/solver.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>

#include "nomamec/util.hpp"

namespace nomamec {

namespace {

// The mandatory-offload start leaves groups whose floor is zero with no
// payload; the first time step would then strip their slot and lock them
// out of offloading for good. Seed those groups from one capacity-aware
// data pass at the uniform initial slots, then drop the seed again for
// groups whose best possible rate margin already loses to the slot price:
// those belong at zero, and letting them in only to be priced out later
// costs a long geometric decay.
std::vector<std::array<double, 2>> initial_data(const ProblemInstance& instance,
                                                const std::vector<double>& t0) {
  const std::size_t n = instance.group_count();
  std::vector<std::array<double, 2>> d0(n);
  bool any_zero_floor = false;
  for (std::size_t i = 0; i < n; ++i) {
    const NomaGroup& g = instance.groups[i];
    d0[i] = {min_offload_bits(g.user1, instance.deadline_s),
             min_offload_bits(g.user2, instance.deadline_s)};
    if (d0[i][0] + d0[i][1] == 0.0) any_zero_floor = true;
  }
  if (!any_zero_floor) return d0;

  const DataSolution seed = solve_data(instance, t0);
  std::vector<std::size_t> seeded;
  for (std::size_t i = 0; i < n; ++i) {
    if (d0[i][0] + d0[i][1] == 0.0) {
      d0[i] = seed.data_bits[i];
      if (d0[i][0] + d0[i][1] > 0.0) seeded.push_back(i);
    }
  }
  if (seeded.empty()) return d0;

  const double alpha0 = solve_time(instance, d0).alpha;
  for (std::size_t i : seeded) {
    if (group_rate_margin(instance.groups[i], instance.bandwidth_hz, seed.beta) >=
        -alpha0 * (1.0 - 1e-9))
      d0[i] = {0.0, 0.0};
  }
  return d0;
}

}  // namespace

SolveResult solve(const ProblemInstance& instance, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.xi <= 0.0) throw std::invalid_argument("xi must be positive");
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  const ValidationReport validation = validate_instance(instance);
  if (!validation.ok())
    throw InfeasibleError("instance rejected:\n" + validation.to_string());

  const std::size_t n = instance.group_count();
  std::vector<double> t(n, instance.deadline_s / static_cast<double>(n));
  std::vector<std::array<double, 2>> d = initial_data(instance, t);

  SolveTrace trace;
  trace.objective_j.push_back(total_objective(instance, {t, d}));
  trace.alpha.push_back(0.0);
  trace.beta.push_back(0.0);
  trace.termination = Termination::kMaxIterations;

  double beta = 0.0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const TimeSolution ts = solve_time(instance, d);
    const double held = total_objective(instance, {ts.time_s, d});
    trace.half_step_objective_j.push_back(held);
    DataSolution ds = solve_data(instance, ts.time_s);
    double value = total_objective(instance, {ts.time_s, ds.data_bits});
    // Monotone safeguard: near the dual's singular points the refreshed
    // data can lose to the incumbent by rounding; both are exact feasible
    // candidates, so keep the better one.
    if (value > held) {
      ds.data_bits = d;
      value = held;
    }

    // Retire groups the duals have priced out of the air: their payload
    // decays geometrically under the alternation, so once the remainder is
    // energetically negligible, pin it at zero. If round-to-round noise
    // freezes the natural decay first, shrink the payload by hand instead,
    // but never by more than the recorded-descent slack allows per round.
    bool retired = false;
    const double slack = 0.4e-12 * std::max(value, 1e-15);
    for (std::size_t i = 0; i < n; ++i) {
      const double payload = ds.data_bits[i][0] + ds.data_bits[i][1];
      if (ts.time_s[i] <= 0.0 || payload <= 0.0) continue;
      const NomaGroup& g = instance.groups[i];
      if (min_offload_bits(g.user1, instance.deadline_s) > 0.0 ||
          min_offload_bits(g.user2, instance.deadline_s) > 0.0)
        continue;
      if (group_rate_margin(g, instance.bandwidth_hz, ds.beta) <
          -ts.alpha * (1.0 - 1e-9))
        continue;
      const double zero_cost =
          ds.data_bits[i][0] * g.user1.cycles_per_bit * g.user1.energy_per_cycle_j +
          ds.data_bits[i][1] * g.user2.cycles_per_bit * g.user2.energy_per_cycle_j -
          group_offload_energy(g, ds.data_bits[i][0], ds.data_bits[i][1], ts.time_s[i],
                               instance.bandwidth_hz);
      if (zero_cost <= slack) {
        ds.data_bits[i] = {0.0, 0.0};
        retired = true;
      } else if (options.kkt_target > 0.0 && zero_cost > 0.0) {
        const double keep = std::max(0.0, 1.0 - slack / zero_cost);
        ds.data_bits[i][0] *= keep;
        ds.data_bits[i][1] *= keep;
        retired = true;
      }
    }
    if (retired) value = total_objective(instance, {ts.time_s, ds.data_bits});

    const double previous = trace.objective_j.back();
    trace.objective_j.push_back(value);
    trace.alpha.push_back(ts.alpha);
    trace.beta.push_back(ds.beta);

    const bool fixed_point = (ds.data_bits == d);
    t = ts.time_s;
    d = ds.data_bits;
    beta = ds.beta;

    const double rel_change = std::abs(value - previous) / std::max(previous, 1e-15);
    if (fixed_point || rel_change < options.xi) {
      if (options.kkt_target > 0.0 && !fixed_point && iter < options.max_iterations) {
        // Certification gate: accept the stop only if the refreshed
        // certificate meets the target; a fixed point cannot improve.
        const TimeSolution probe = solve_time(instance, d);
        const double probe_kkt =
            kkt_residual(instance, {probe.time_s, d}, probe.alpha, beta);
        if (probe_kkt > options.kkt_target) continue;
      }
      trace.termination = Termination::kConverged;
      break;
    }
  }

  // Closing slot refresh: one extra time half-step so the returned slots
  // and the certified slot price match the final data exactly. Pure
  // minimization, so the descent chain is preserved.
  const TimeSolution closing = solve_time(instance, d);
  trace.half_step_objective_j.push_back(total_objective(instance, {closing.time_s, d}));
  trace.final_alpha = closing.alpha;
  t = closing.time_s;

  SolveResult result;
  result.allocation = {t, d};
  result.report = energy_report(instance, result.allocation);
  trace.kkt_residual = kkt_residual(instance, result.allocation, trace.final_alpha, beta);
  trace.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.trace = trace;
  return result;
}

double kkt_residual(const ProblemInstance& instance, const Allocation& alloc, double alpha,
                    double beta) {
  const std::size_t n = instance.group_count();
  assert(alloc.time_s.size() == n && alloc.data_bits.size() == n);
  const double b = instance.bandwidth_hz;
  double residual = 0.0;

  double time_sum = 0.0;
  double load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const NomaGroup& g = instance.groups[i];
    const double t = alloc.time_s[i];
    const double d1 = alloc.data_bits[i][0];
    const double d2 = alloc.data_bits[i][1];
    time_sum += t;
    load += d1 * g.user1.cycles_per_bit + d2 * g.user2.cycles_per_bit;

    if (t > 0.0) {
      const double gp = (d1 + d2 > 0.0) ? g_prime(g, d1, d2, b, t) : 0.0;
      residual = std::max(residual, std::abs(gp + alpha) / (g.a2 * b));

      const double bt = b * t;
      const double e_sum = detail::pow2((d1 + d2) / bt);
      const double e_weak = detail::pow2(d2 / bt);
      for (int j = 0; j < 2; ++j) {
        const UserProfile& u = g.user(j);
        const DataBox box = data_box(u, instance.deadline_s);
        if (box.hi - box.lo <= 0.0) continue;  // pinned coordinate
        const double d = alloc.data_bits[i][static_cast<std::size_t>(j)];
        double expr = kLn2 * g.a1 * e_sum + (beta - u.energy_per_cycle_j) * u.cycles_per_bit;
        double scale = kLn2 * g.a1 * e_sum +
                       std::abs(beta - u.energy_per_cycle_j) * u.cycles_per_bit;
        if (j == 1) {
          expr += kLn2 * (g.a2 - g.a1) * e_weak;
          scale += kLn2 * (g.a2 - g.a1) * e_weak;
        }
        double violation;
        if (d <= box.lo)
          violation = std::max(0.0, -expr);
        else if (d >= box.hi)
          violation = std::max(0.0, expr);
        else
          violation = std::abs(expr);
        residual = std::max(residual, violation / scale);
      }
    } else {
      // Idle corner (t == 0 forces d == 0). The energy is 1-homogeneous in
      // (t, d), so the corner is optimal exactly when the group's best
      // priced rate margin cannot beat the slot price.
      const double margin = group_rate_margin(g, b, beta);
      const double violation = std::max(0.0, -(margin + alpha));
      residual = std::max(residual, violation / std::max(alpha + std::abs(margin), 1e-300));
    }
  }

  const double deadline = instance.deadline_s;
  residual = std::max(residual, std::max(0.0, time_sum - deadline) / deadline);
  if (alpha > 0.0) residual = std::max(residual, std::abs(time_sum - deadline) / deadline);

  const double cap = std::max(instance.cloud_capacity_cycles, 1.0);
  residual = std::max(residual, std::max(0.0, load - instance.cloud_capacity_cycles) / cap);
  if (beta > 0.0) residual = std::max(residual, std::abs(load - instance.cloud_capacity_cycles) / cap);
  return residual;
}

std::string trace_to_csv(const SolveTrace& trace) {
  std::ostringstream out;
  out << "iteration,objective_joules,alpha,beta\n";
  for (std::size_t i = 0; i < trace.objective_j.size(); ++i) {
    out << i << ',' << format_sci(trace.objective_j[i]) << ',' << format_sci(trace.alpha[i])
        << ',' << format_sci(trace.beta[i]) << '\n';
  }
  return out.str();
}

}  // namespace nomamec
