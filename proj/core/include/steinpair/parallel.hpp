#pragma once

#include <cstdint>
#include <functional>

namespace steinpair {

int resolve_workers(int workers);  // <= 0 -> available parallelism

/// Runs fn over contiguous disjoint chunks of [0, count) on `workers`
/// threads. The chunking never affects results: all replication state is
/// derived from the replication index and reductions happen afterwards with
/// pairwise summation, so any worker count gives bit-identical output.
void parallel_for(std::uint64_t count, int workers,
                  const std::function<void(std::uint64_t, std::uint64_t)>& fn);

}  // namespace steinpair
