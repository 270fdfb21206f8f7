#pragma once

#include <cstddef>
#include <functional>

namespace eigenmarket {

/// Worker count from EIGENMARKET_THREADS (0 or unset = hardware concurrency).
std::size_t thread_budget();

/// Calls body(i) for i in [0, count). Each index must write only its own output
/// slot, so results do not depend on how indices are spread over threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_per_thread = 4);

}  // namespace eigenmarket
