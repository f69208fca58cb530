#include "nomamec/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nomamec {

ProblemInstance make_instance(std::vector<std::pair<UserProfile, UserProfile>> user_pairs,
                              double bandwidth_hz, double noise_psd_w_per_hz, double deadline_s,
                              double cloud_capacity_cycles) {
  ProblemInstance instance;
  instance.bandwidth_hz = bandwidth_hz;
  instance.noise_psd_w_per_hz = noise_psd_w_per_hz;
  instance.deadline_s = deadline_s;
  instance.cloud_capacity_cycles = cloud_capacity_cycles;
  instance.groups.reserve(user_pairs.size());
  for (auto& [u1, u2] : user_pairs) {
    NomaGroup g;
    g.user1 = u1;
    g.user2 = u2;
    g.a1 = noise_psd_w_per_hz / g.user1.channel_gain;
    g.a2 = noise_psd_w_per_hz / g.user2.channel_gain;
    instance.groups.push_back(g);
  }
  return instance;
}

double min_offload_bits(const UserProfile& user, double deadline_s) {
  const double demand = user.data_bits * user.cycles_per_bit;
  const double local = user.local_capacity_cycles_per_s * deadline_s;
  if (demand <= local) return 0.0;
  return (demand - local) / user.cycles_per_bit;
}

bool ValidationReport::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

bool ValidationReport::has_warning(const std::string& code) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) {
    return d.severity == Severity::kWarning && d.code == code;
  });
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& d : diagnostics) {
    out << (d.severity == Severity::kError ? "error" : "warning") << " [" << d.code << "] "
        << d.message << "\n";
  }
  return out.str();
}

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }
bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void check_user(const UserProfile& u, int group, int user, std::vector<Diagnostic>& out) {
  auto fail = [&](const std::string& field) {
    std::ostringstream msg;
    msg << "invalid " << field << ", group " << group << " user " << (user + 1);
    out.push_back({Severity::kError, "bad_field", msg.str(), group, user});
  };
  if (!finite_nonneg(u.data_bits)) fail("data_bits (must be finite, >= 0)");
  if (!finite_positive(u.cycles_per_bit)) fail("cycles_per_bit (must be finite, > 0)");
  if (!finite_nonneg(u.energy_per_cycle_j)) fail("energy_per_cycle_j (must be finite, >= 0)");
  if (!finite_positive(u.local_capacity_cycles_per_s))
    fail("local_capacity_cycles_per_s (must be finite, > 0)");
  if (!finite_positive(u.channel_gain)) fail("channel_gain (must be finite, > 0)");
}

}  // namespace

ValidationReport validate_instance(const ProblemInstance& instance) {
  ValidationReport report;
  auto& diags = report.diagnostics;

  if (instance.groups.empty())
    diags.push_back({Severity::kError, "empty", "instance has no groups", -1, -1});
  if (!finite_positive(instance.bandwidth_hz))
    diags.push_back({Severity::kError, "bad_field", "invalid bandwidth_hz", -1, -1});
  if (!finite_positive(instance.noise_psd_w_per_hz))
    diags.push_back({Severity::kError, "bad_field", "invalid noise_psd_w_per_hz", -1, -1});
  if (!finite_positive(instance.deadline_s))
    diags.push_back({Severity::kError, "bad_field", "invalid deadline_s", -1, -1});
  if (!finite_nonneg(instance.cloud_capacity_cycles))
    diags.push_back({Severity::kError, "bad_field", "invalid cloud_capacity_cycles", -1, -1});
  if (!report.ok()) return report;

  for (std::size_t i = 0; i < instance.groups.size(); ++i) {
    const NomaGroup& g = instance.groups[i];
    const int gi = static_cast<int>(i);
    check_user(g.user1, gi, 0, diags);
    check_user(g.user2, gi, 1, diags);
    if (g.user1.channel_gain < g.user2.channel_gain) {
      std::ostringstream msg;
      msg << "ordering violated, group " << gi << " (strong user must come first)";
      diags.push_back({Severity::kError, "ordering", msg.str(), gi, -1});
    } else if (g.user1.channel_gain == g.user2.channel_gain) {
      std::ostringstream msg;
      msg << "degenerate group " << gi << " (equal channel gains)";
      diags.push_back({Severity::kWarning, "degenerate_group", msg.str(), gi, -1});
    }
    const double want_a1 = instance.noise_psd_w_per_hz / g.user1.channel_gain;
    const double want_a2 = instance.noise_psd_w_per_hz / g.user2.channel_gain;
    if (g.a1 != want_a1 || g.a2 != want_a2) {
      std::ostringstream msg;
      msg << "noise-over-gain coefficients stale, group " << gi;
      diags.push_back({Severity::kError, "a_mismatch", msg.str(), gi, -1});
    }
  }
  if (!report.ok()) return report;

  double mandatory_cycles = 0.0;
  for (const NomaGroup& g : instance.groups) {
    for (int j = 0; j < 2; ++j) {
      const UserProfile& u = g.user(j);
      mandatory_cycles += min_offload_bits(u, instance.deadline_s) * u.cycles_per_bit;
    }
  }
  if (mandatory_cycles > instance.cloud_capacity_cycles) {
    std::ostringstream msg;
    msg << "infeasible: mandatory offload exceeds cloud capacity (" << mandatory_cycles << " > "
        << instance.cloud_capacity_cycles << " cycles)";
    diags.push_back({Severity::kError, "infeasible", msg.str(), -1, -1});
  }
  return report;
}

bool is_feasible(const ProblemInstance& instance, const Allocation& alloc, double rel_tol) {
  const std::size_t n = instance.group_count();
  if (alloc.time_s.size() != n || alloc.data_bits.size() != n) return false;

  double time_sum = 0.0;
  double load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const NomaGroup& g = instance.groups[i];
    const double t = alloc.time_s[i];
    if (!(t >= 0.0)) return false;
    time_sum += t;
    double group_bits = 0.0;
    for (int j = 0; j < 2; ++j) {
      const UserProfile& u = g.user(j);
      const double d = alloc.data_bits[i][static_cast<std::size_t>(j)];
      const double lo = min_offload_bits(u, instance.deadline_s);
      if (!(d >= lo && d <= u.data_bits)) return false;
      group_bits += d;
      load += d * u.cycles_per_bit;
    }
    if (t == 0.0 && group_bits > 0.0) return false;
  }
  if (time_sum > instance.deadline_s * (1.0 + rel_tol)) return false;
  if (load > instance.cloud_capacity_cycles +
                 rel_tol * std::max(instance.cloud_capacity_cycles, 1.0))
    return false;
  return true;
}

}  // namespace nomamec
