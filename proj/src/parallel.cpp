#include "levsketch/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace levsketch {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) { g_threads.store(std::max(1, n)); }

int num_threads() { return g_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
  const auto workers = static_cast<std::size_t>(num_threads());
  if (workers <= 1 || count <= min_chunk) {
    if (count > 0) body(0, count);
    return;
  }
  const std::size_t chunks = std::min(workers, (count + min_chunk - 1) / min_chunk);
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::jthread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t begin = c * step;
    const std::size_t end = std::min(count, begin + step);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(count, step));
}

}  // namespace levsketch
