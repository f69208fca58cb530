#include "nomamec/energy.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

namespace nomamec {

namespace detail {

double pow2_checked(double x) {
  if (x > kMaxPow2Arg) {
    std::ostringstream msg;
    msg << "power overflow: exponent " << x << " bits per channel use exceeds " << kMaxPow2Arg;
    throw PowerOverflowError(msg.str());
  }
  return pow2(x);
}

}  // namespace detail

double local_energy(const UserProfile& user, double offloaded_bits) {
  assert(offloaded_bits >= 0.0 && offloaded_bits <= user.data_bits);
  return (user.data_bits - offloaded_bits) * user.cycles_per_bit * user.energy_per_cycle_j;
}

namespace {

void require_transmittable(double d1, double d2, double t_s) {
  if (t_s < 0.0) throw std::invalid_argument("negative slot duration");
  if (t_s == 0.0 && d1 + d2 > 0.0)
    throw std::invalid_argument("zero time, positive data");
}

}  // namespace

PowerPair offload_powers(const NomaGroup& group, double d1, double d2, double t_s,
                         double bandwidth_hz) {
  require_transmittable(d1, d2, t_s);
  if (d1 + d2 <= 0.0) return {0.0, 0.0};
  const double bt = bandwidth_hz * t_s;
  const double e_sum = detail::pow2_checked((d1 + d2) / bt);
  const double e_weak = detail::pow2_checked(d2 / bt);
  PowerPair p;
  p.p1_w = group.a1 * bandwidth_hz * (e_sum - e_weak);
  p.p2_w = group.a2 * bandwidth_hz * (e_weak - 1.0);
  return p;
}

double group_offload_energy(const NomaGroup& group, double d1, double d2, double t_s,
                            double bandwidth_hz) {
  require_transmittable(d1, d2, t_s);
  if (d1 + d2 <= 0.0) return 0.0;
  const double bt = bandwidth_hz * t_s;
  const double e_sum = detail::pow2_checked((d1 + d2) / bt);
  const double e_weak = detail::pow2_checked(d2 / bt);
  return bt * (group.a1 * e_sum + (group.a2 - group.a1) * e_weak - group.a2);
}

double total_objective(const ProblemInstance& instance, const Allocation& alloc) {
  assert(alloc.time_s.size() == instance.group_count());
  assert(alloc.data_bits.size() == instance.group_count());
  double total = 0.0;
  for (std::size_t i = 0; i < instance.group_count(); ++i) {
    const NomaGroup& g = instance.groups[i];
    total += group_offload_energy(g, alloc.data_bits[i][0], alloc.data_bits[i][1],
                                  alloc.time_s[i], instance.bandwidth_hz);
    total += local_energy(g.user1, alloc.data_bits[i][0]);
    total += local_energy(g.user2, alloc.data_bits[i][1]);
  }
  return total;
}

double g_prime(const NomaGroup& group, double d1, double d2, double bandwidth_hz, double t_s) {
  if (t_s <= 0.0) throw std::invalid_argument("g_prime requires t > 0");
  const double payload = d1 + d2;
  if (payload <= 0.0) return 0.0;  // energy is identically zero without data
  const double b = bandwidth_hz;
  const double bt = b * t_s;
  double value = group.a1 * (b - kLn2 * payload / t_s) * detail::pow2(payload / bt);
  if (group.a2 > group.a1)
    value += (group.a2 - group.a1) * (b - kLn2 * d2 / t_s) * detail::pow2(d2 / bt);
  value -= group.a2 * b;
  return value;
}

EnergyReport energy_report(const ProblemInstance& instance, const Allocation& alloc) {
  EnergyReport report;
  const std::size_t n = instance.group_count();
  report.offload_energy_j.resize(n);
  report.local_energy_j.resize(n);
  report.powers_w.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const NomaGroup& g = instance.groups[i];
    const double d1 = alloc.data_bits[i][0];
    const double d2 = alloc.data_bits[i][1];
    const double t = alloc.time_s[i];
    report.offload_energy_j[i] = group_offload_energy(g, d1, d2, t, instance.bandwidth_hz);
    report.powers_w[i] = offload_powers(g, d1, d2, t, instance.bandwidth_hz);
    report.local_energy_j[i] = {local_energy(g.user1, d1), local_energy(g.user2, d2)};
    total += report.offload_energy_j[i] + report.local_energy_j[i][0] +
             report.local_energy_j[i][1];
  }
  report.total_j = total;
  return report;
}

}  // namespace nomamec
