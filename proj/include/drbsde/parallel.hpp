#pragma once

#include <cstddef>
#include <functional>

namespace drbsde {

/// Worker count taken from the DRBSDE_THREADS environment variable;
/// defaults to 1 (serial) when unset or unparsable.
int thread_count();

/// Runs fn(i) for i in [0, n). With more than one worker the index range is
/// split into contiguous chunks; every call must write only to its own
/// slot, so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace drbsde
