// include/vigas/threading.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_THREADING_H_
#define VIGAS_THREADING_H_

#include <cstddef>
#include <functional>

namespace vigas {

// Global worker cap, settable once from the CLI (--threads / VIGAS_THREADS).
// 0 means "use hardware concurrency".
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; results must be
// written to disjoint, preallocated slots so the outcome does not depend on
// scheduling. Exceptions from workers are rethrown on the calling thread.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace vigas

#endif  // VIGAS_THREADING_H_
