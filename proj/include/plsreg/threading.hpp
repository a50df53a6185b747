#pragma once

namespace plsreg::threading {

// Number of threads the blocked kernels may use.
int max_threads();

// Clamp to >= 1.  Results do not depend on this value: kernels partition work
// into fixed blocks and reduce in block order.
void set_max_threads(int count);

// Apply the PLSREG_THREADS environment variable if set and positive.
void configure_from_env();

}  // namespace plsreg::threading
