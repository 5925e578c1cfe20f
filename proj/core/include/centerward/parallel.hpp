#pragma once

namespace centerward {

/// Thread count for the OpenMP loops; a no-op without OpenMP.
void set_threads(int n);
int max_threads();
/// CENTERWARD_THREADS if set, otherwise fallback. Throws ConfigError on junk.
int threads_from_env(int fallback);

}  // namespace centerward
