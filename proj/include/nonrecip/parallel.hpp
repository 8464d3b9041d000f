#pragma once

namespace nonrecip {

/// Worker count for sweep kernels: NONRECIP_THREADS when set to a positive
/// integer, otherwise the OpenMP default. Always 1 without OpenMP.
int sweep_threads();

}  // namespace nonrecip
