#pragma once

#include <cstddef>
#include <functional>

namespace levsketch {

// Library-wide worker count. 1 (the default) is the bitwise reference mode;
// every parallel loop in the library partitions work so that each output
// element is produced by exactly one worker with the same arithmetic order,
// so results do not depend on this setting.
void set_num_threads(int n);
int num_threads();

// Runs body(begin, end) over contiguous chunks of [0, count).
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace levsketch
