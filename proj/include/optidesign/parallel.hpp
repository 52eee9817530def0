#pragma once

#include <cstddef>
#include <cstdint>

namespace optidesign {

/// Every data-parallel kernel has a serial reference path. Both produce
/// identical results: parallel loops only fill pre-sized slots and all
/// reductions run serially in index order afterwards.
enum class Execution { serial, parallel };

/// Applies OPTIDESIGN_THREADS (if set to a positive integer) as the OpenMP
/// thread cap. Returns the resulting maximum thread count.
int configure_threads_from_env();

int max_threads();

/// SplitMix64 mix of (seed, index); used to derive per-trial / per-chunk
/// seeds that do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace optidesign
