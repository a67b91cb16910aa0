#pragma once

#include <algorithm>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace leakstudy {

// Applies f to 0..n-1 on up to `workers` threads and returns the results in
// index order, so output never depends on scheduling. The first exception (by
// index) is rethrown after all workers join.
template <class F>
auto parallel_map(std::size_t n, int workers, F f) -> std::vector<std::invoke_result_t<F, std::size_t>> {
  using R = std::invoke_result_t<F, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t w = std::clamp<std::size_t>(workers > 0 ? static_cast<std::size_t>(workers) : 1, 1,
                                                 std::max<std::size_t>(n, 1));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    run(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t t = 0; t < w; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b >= e) break;
      threads.emplace_back(run, b, e);
    }
    for (auto& th : threads) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace leakstudy
