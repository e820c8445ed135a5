#pragma once

#include <cstdint>
#include <functional>

namespace exchangelab {

// Worker count: EXCHANGELAB_THREADS if set (min 1), else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n), splitting the range over worker_count() threads.
// fn must write only to per-index slots so results are order-independent;
// exceptions propagate (first one wins). Runs inline when n is small or a
// single worker is configured.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace exchangelab
