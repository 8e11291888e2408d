// SPDX-License-Identifier: Apache-2.0
#include "kronred/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace kronred {

void parallel_chunks(std::size_t count, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t w = workers <= 1 ? 1 : std::min<std::size_t>(std::size_t(workers), count);
  if (w == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  const std::size_t base = count / w;
  const std::size_t extra = count % w;
  std::size_t begin = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }
  for (std::size_t i = 1; i < w; ++i)
    pool.emplace_back([&fn, r = ranges[i]] { fn(r.first, r.second); });
  fn(ranges[0].first, ranges[0].second);
  for (std::thread& t : pool) t.join();
}

int default_workers() {
  if (const char* env = std::getenv("KRONRED_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace kronred
