#pragma once

#include <array>
#include <vector>

#include "nomamec/model.hpp"

namespace nomamec {

struct TimeSolution {
  std::vector<double> time_s;
  double alpha = 0.0;  // dual price of the slot budget, J/s
  int inner_iterations = 0;
  int outer_iterations = 0;
};

// Inverts the offload-energy derivative: returns t with g'(t) == target.
// The derivative ranges over (-inf, 0) for positive payloads, so targets
// must be negative. Deterministic bisection; `scale_s` seeds the bracket.
// inner_iterations, when given, accumulates bisection steps.
double invert_g_prime(const NomaGroup& group, double d1, double d2, double bandwidth_hz,
                      double target, double scale_s = 1.0, int* inner_iterations = nullptr);

// Minimizes total offload energy over slot durations for fixed data.
// Groups without payload get zero time; the rest share the whole budget
// at a common derivative level -alpha found by bisection. With no payload
// anywhere the zero vector is returned.
TimeSolution solve_time(const ProblemInstance& instance,
                        const std::vector<std::array<double, 2>>& data_bits);

}  // namespace nomamec
