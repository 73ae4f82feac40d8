#pragma once

#include <functional>

namespace nlcl {

/// Worker count: NLCL_THREADS if set (>=1), else min(4, hardware threads).
int worker_count();

/// Runs fn(lo, hi) over disjoint chunks of [0, n). Chunk boundaries depend
/// only on n and the worker count, and workers write disjoint ranges, so
/// results are bit-identical for any thread count.
void parallel_for(int n, const std::function<void(int, int)>& fn);

} // namespace nlcl
