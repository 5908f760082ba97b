#pragma once

namespace symcomp::parallel {

/// Number of OpenMP workers used by the parallel kernels.
int worker_count();

/// Caps the worker count; values < 1 are clamped to 1.
void set_worker_count(int n);

/// Reads SYMCOMP_THREADS (if set) and applies it. Returns the resulting count.
int configure_from_env();

}  // namespace symcomp::parallel
