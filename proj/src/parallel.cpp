#include "drbsde/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace drbsde {

int thread_count() {
  const char* env = std::getenv("DRBSDE_THREADS");
  if (env == nullptr) return 1;
  try {
    const int n = std::stoi(env);
    return n >= 1 ? n : 1;
  } catch (...) {
    return 1;
  }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t used =
      std::min(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w]() {
      const std::size_t lo = n * w / used;
      const std::size_t hi = n * (w + 1) / used;
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace drbsde
