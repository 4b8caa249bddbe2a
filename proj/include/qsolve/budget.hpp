#pragma once

#include <chrono>
#include <cstdint>

#include "qsolve/rational.hpp"

namespace qsolve {

/// Simple counted budget shared across one solver run. Node counts bound
/// search work, but a node's wall cost varies by orders of magnitude, so
/// an optional deadline backs the count up for callers that need one.
struct Budget {
  uint64_t remaining;
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  explicit Budget(uint64_t n) : remaining(n) {}
  void tick(uint64_t cost = 1) {
    if (remaining < cost) throw resource_error("budget exhausted");
    remaining -= cost;
    if (std::chrono::steady_clock::now() > deadline)
      throw resource_error("time budget exhausted");
  }
};

}  // namespace qsolve
