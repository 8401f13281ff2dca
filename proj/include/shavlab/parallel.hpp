#pragma once

#include <cstddef>
#include <functional>

namespace shavlab {

// Runs fn(0), ..., fn(count-1) on up to `workers` threads.
//
// Batches are claimed through an atomic counter, so the assignment of batch
// to thread is nondeterministic; callers must write each batch's result into
// a slot indexed by the batch id and reduce in index order afterwards. Under
// that discipline results are identical for any worker count.
void parallel_batches(std::size_t count, unsigned workers,
                      const std::function<void(std::size_t)>& fn);

// Default worker count (hardware concurrency, at least 1).
unsigned default_workers();

}  // namespace shavlab
