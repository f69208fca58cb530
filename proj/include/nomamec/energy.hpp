#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nomamec/model.hpp"

namespace nomamec {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

// Largest exponent (in bits) accepted by the checked power-of-two helper.
inline constexpr double kMaxPow2Arg = 700.0 / kLn2;

// Raised when a requested transmission would need a power beyond double
// range (tiny slot, large payload). Explicit diagnosis instead of inf.
class PowerOverflowError : public std::domain_error {
 public:
  explicit PowerOverflowError(const std::string& what) : std::domain_error(what) {}
};

namespace detail {

// Single exponential primitive: 2^x computed as exp(ln2 * x). Saturates to
// +inf on overflow; callers that must not silently blow up use the checked
// wrapper below.
inline double pow2(double x) { return std::exp(kLn2 * x); }

double pow2_checked(double x);

}  // namespace detail

// Local computing energy for the bits kept on the device: (R - d) * C * P.
// Precondition: 0 <= d <= R (caller bug otherwise).
double local_energy(const UserProfile& user, double offloaded_bits);

struct PowerPair {
  double p1_w = 0.0;
  double p2_w = 0.0;
};

// Transmit powers that deliver (d1, d2) bits within t seconds under
// superposition coding with successive decoding at the receiver:
//   p1 = a1*B*(2^((d1+d2)/(B*t)) - 2^(d2/(B*t)))
//   p2 = a2*B*(2^(d2/(B*t)) - 1)
// t == 0 with zero data yields (0, 0); t == 0 with data is an error.
PowerPair offload_powers(const NomaGroup& group, double d1, double d2, double t_s,
                         double bandwidth_hz);

// Slot energy of one group, t*(p1+p2) in closed form:
//   B*t*(a1*2^((d1+d2)/(B*t)) + (a2-a1)*2^(d2/(B*t)) - a2)
// Continuously extended to 0 at t == 0 with zero data.
double group_offload_energy(const NomaGroup& group, double d1, double d2, double t_s,
                            double bandwidth_hz);

// Total user energy of an allocation: offload energy of every group plus
// local computing energy of every user.
double total_objective(const ProblemInstance& instance, const Allocation& alloc);

// Derivative in t of the group offload energy at fixed data. Strictly
// increasing and negative for positive payloads, tending to 0 from below
// as t grows; identically 0 when d1 + d2 == 0. May return -inf for slots
// far too small for the payload.
double g_prime(const NomaGroup& group, double d1, double d2, double bandwidth_hz, double t_s);

struct EnergyReport {
  std::vector<double> offload_energy_j;                 // per group
  std::vector<std::array<double, 2>> local_energy_j;    // per user
  std::vector<PowerPair> powers_w;                      // per group
  double total_j = 0.0;
};

EnergyReport energy_report(const ProblemInstance& instance, const Allocation& alloc);

}  // namespace nomamec
