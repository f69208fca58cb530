#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nomamec {

// Per-user workload and channel parameters. Units are SI throughout:
// bits, CPU cycles, joules, seconds, Hz; channel_gain is a linear power
// gain (not dB).
struct UserProfile {
  double data_bits = 0.0;                    // R, total input data
  double cycles_per_bit = 1.0;               // C, CPU cycles per input bit
  double energy_per_cycle_j = 0.0;           // P, local energy per cycle
  double local_capacity_cycles_per_s = 1.0;  // F_local
  double channel_gain = 1.0;                 // h, uplink power gain
};

// Two users sharing one slot by superposition coding; user1 is the strong
// user (channel_gain >= user2's). a1/a2 are the noise-over-gain prices
// sigma2/h, filled in when the instance is assembled.
struct NomaGroup {
  UserProfile user1;
  UserProfile user2;
  double a1 = 0.0;
  double a2 = 0.0;

  const UserProfile& user(int j) const { return j == 0 ? user1 : user2; }
};

struct ProblemInstance {
  std::vector<NomaGroup> groups;
  double bandwidth_hz = 0.0;
  double noise_psd_w_per_hz = 0.0;
  double deadline_s = 0.0;
  double cloud_capacity_cycles = 0.0;

  std::size_t group_count() const { return groups.size(); }
};

// Assembles an instance and precomputes the per-user noise-over-gain
// coefficients. Does not reorder users or reject anything; run
// validate_instance afterwards.
ProblemInstance make_instance(std::vector<std::pair<UserProfile, UserProfile>> user_pairs,
                              double bandwidth_hz, double noise_psd_w_per_hz, double deadline_s,
                              double cloud_capacity_cycles);

// Bits that cannot be computed locally within the deadline:
// max{(R*C - F_local*T)/C, 0}. Always in [0, R].
double min_offload_bits(const UserProfile& user, double deadline_s);

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  int group = -1;  // -1 when not tied to a group
  int user = -1;   // 0/1 within the group, -1 otherwise
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool ok() const;  // true when no error-severity diagnostics exist
  bool has_warning(const std::string& code) const;
  std::string to_string() const;
};

// Checks every structural invariant (finiteness, ranges, channel ordering,
// a == sigma2/h) and global feasibility (mandatory offload within cloud
// capacity). Degenerate groups (equal gains) are flagged as warnings.
ValidationReport validate_instance(const ProblemInstance& instance);

// Decision vector: per-group slot duration and per-user offloaded bits.
struct Allocation {
  std::vector<double> time_s;
  std::vector<std::array<double, 2>> data_bits;
};

// Constraint check with a small relative slack on the coupled sums
// (time budget, cloud capacity); box bounds are checked exactly.
bool is_feasible(const ProblemInstance& instance, const Allocation& alloc,
                 double rel_tol = 1e-9);

// Thrown when a solve is requested on an instance that fails validation.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nomamec
