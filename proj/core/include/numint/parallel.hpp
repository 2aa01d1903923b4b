#pragma once

#include <cstdint>
#include <functional>

namespace numint {

// Worker cap: NUMINT_THREADS if set (>=1), else hardware concurrency.
int max_threads();

// Runs fn(i) for i in [begin, end) across up to max_threads() workers.
// Outputs must go to disjoint, preallocated slots so results do not depend
// on the thread count. Exceptions from workers are rethrown on the caller.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace numint
