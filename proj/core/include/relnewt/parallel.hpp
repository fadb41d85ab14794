#pragma once

#include <functional>

namespace relnewt {

/** Worker count: an explicit positive request wins, then the RELNEWT_THREADS
    environment variable, then the hardware concurrency. Never less than 1. */
int resolve_thread_count(int requested = 0);

/** Runs fn(row) for rows 0..n_rows-1. With more than one worker the rows are
    claimed from a shared counter; the first exception is rethrown after all
    workers have joined. fn must keep disjoint rows independent. */
void parallel_rows(int n_rows, int n_threads, const std::function<void(int)>& fn);

} // namespace relnewt
