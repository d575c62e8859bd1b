#pragma once

// Deterministic fan-out: each index writes only its own output slot.

#include <cstddef>
#include <cstdint>
#include <functional>

namespace arcoh {

/// Worker count: the last value passed to set_thread_count, else the
/// ARCOH_THREADS environment variable, else the hardware concurrency.
int thread_count();
void set_thread_count(int threads);

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Seed of the index-th draw of a run seeded with `seed`.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace arcoh
