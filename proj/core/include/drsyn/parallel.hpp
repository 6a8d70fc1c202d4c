#pragma once

#include <cstddef>
#include <functional>

namespace drsyn {

/// Worker count used by parallel_for; 0 selects the hardware concurrency.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Calls fn(i) for i in [0, n) on contiguous static chunks. Each index must
/// write only its own output slot, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace drsyn
