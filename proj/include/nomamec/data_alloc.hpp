#pragma once

#include <array>
#include <vector>

#include "nomamec/model.hpp"

namespace nomamec {

struct DataSolution {
  std::vector<std::array<double, 2>> data_bits;
  double beta = 0.0;  // dual price of cloud capacity, J/cycle
  int search_iterations = 0;
};

// Per-user feasible interval for offloaded bits: [mandatory, total].
struct DataBox {
  double lo = 0.0;
  double hi = 0.0;
};
DataBox data_box(const UserProfile& user, double deadline_s);

// Strong-user closed form at capacity price beta, clamped to its box:
//   B*t*log2( (a2-a1)(P1*C1 - beta*C1) / (a1*(beta*(C1-C2) - P1*C1 + P2*C2)) )
// When the argument is not a positive real the optimum sits on a box edge;
// the edge is picked by the sign of the partial derivative at the box
// midpoint and verified by comparing the objective at both edges.
// Requires a2 > a1; degenerate groups take a dedicated path in solve_data.
double d1_of_beta(const NomaGroup& group, double t_s, double bandwidth_hz, double beta,
                  double deadline_s);

// Weak-user closed form, clamped; a non-positive argument clamps low:
//   B*t*log2( (beta*(C1-C2) - P1*C1 + P2*C2) / (ln2*(a2-a1)) )
double d2_of_beta(const NomaGroup& group, double t_s, double bandwidth_hz, double beta,
                  double deadline_s);

// Exact minimizer of the group's energy-plus-capacity-price objective over
// the data box at fixed slot duration. Handles coupled clamping and
// degenerate (equal-gain) groups; every branch is a closed form.
std::array<double, 2> optimal_group_data(const NomaGroup& group, double t_s, double bandwidth_hz,
                                         double beta, double deadline_s);

// Cloud cycles demanded at price beta: sum of d_ij(beta) * C_ij over groups
// with time, plus the mandatory bits of groups without. Non-increasing in
// beta.
double cloud_load(const ProblemInstance& instance, const std::vector<double>& time_s,
                  double beta);

// Minimizes total energy over offloaded data for fixed slot durations.
// If the unpriced optimum fits the cloud, beta stays 0; otherwise beta is
// found by bisection so the load meets capacity. Groups with zero time
// must have zero mandatory offload and are pinned at zero data.
DataSolution solve_data(const ProblemInstance& instance, const std::vector<double>& time_s);

namespace detail {

// Exact minimizer over explicit boxes; the public entry derives the boxes
// from the deadline. Exposed for rate-space computations.
std::array<double, 2> group_data_in_boxes(const NomaGroup& group, double t_s,
                                          double bandwidth_hz, double beta, const DataBox& box1,
                                          const DataBox& box2);

}  // namespace detail

// Best achievable energy-minus-savings rate (W) of a group offloading at
// price beta with unconstrained rates. Non-positive; a group whose margin
// cannot beat the slot price -alpha is better off fully local.
double group_rate_margin(const NomaGroup& group, double bandwidth_hz, double beta);

}  // namespace nomamec
