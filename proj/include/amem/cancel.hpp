#pragma once

#include <atomic>

#include "amem/errors.hpp"

namespace amem {

// Process-wide cancellation request, set from a signal handler.
inline std::atomic<bool>& cancel_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

inline void check_cancel() {
  if (cancel_flag().load(std::memory_order_relaxed)) throw Interrupted("interrupted");
}

}  // namespace amem
