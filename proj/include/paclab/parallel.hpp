#pragma once

// Small deterministic parallel-for. Work items write into preallocated
// slots, so completion order never affects output; PACLAB_THREADS caps the
// worker count (0 or unset = hardware concurrency).

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace paclab {

inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PACLAB_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

template <typename F>
void parallel_for(size_t count, F&& body, unsigned threads = 0) {
  if (threads == 0) threads = thread_budget();
  if (threads > count) threads = static_cast<unsigned>(count);
  if (count == 0) return;
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&]() {
      while (true) {
        size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace paclab
