#pragma once

#include <cstdint>
#include <functional>

namespace crplab {

// Process-wide worker cap used by the batch drivers. Never affects results:
// work is keyed by replicate index and reduced in index order.
int max_threads();
void set_max_threads(int threads);  // <= 0 restores the hardware default

// Runs body(begin, end) over a static block partition of [0, count).
// Bodies must write only to disjoint, index-addressed slots.
void parallel_blocks(std::int64_t count,
                     const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace crplab
