#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace nomamec {

// Scientific notation with 10 significant digits, C locale. Shared by every
// CSV writer so outputs diff cleanly across tools.
std::string format_sci(double value);

// FNV-1a over bytes; used to assert that paired schemes consumed identical
// instances.
std::uint64_t fnv1a(const std::string& bytes);

// Runs fn(0..n-1) on a bounded pool. Results must be written to
// index-addressed slots so output order never depends on scheduling.
// max_threads == 0 picks a default from the hardware.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned max_threads = 0);

}  // namespace nomamec
