#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace blochlab::core {

/// Thread cap used when a caller does not pass one explicitly (default 1).
int default_threads();
void set_default_threads(int threads);

/// Runs body(i) for i in [0, count) on up to `threads` workers, in contiguous
/// index blocks. Bodies write to disjoint slots; callers reduce afterwards in
/// index order, so results never depend on the thread count. The first
/// exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

/// Pairwise (cascade) summation in a fixed tree order.
template <class T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 8) {
    T acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace blochlab::core
