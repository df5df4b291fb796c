#ifndef CURE_PARALLEL_H_
#define CURE_PARALLEL_H_

#include <functional>

namespace cure {

// CURE_THREADS if set to a positive integer, else the hardware concurrency.
int WorkerCount();

// Runs fn(0) .. fn(n-1) on up to WorkerCount() threads. Each index runs
// exactly once; callers write results into per-index slots. If any call
// throws, the exception from the lowest failing index is rethrown.
void ParallelFor(int n, const std::function<void(int)> &fn);

}  // namespace cure

#endif  // CURE_PARALLEL_H_
