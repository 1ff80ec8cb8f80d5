#pragma once

// Fixed-shape block parallelism. Work is cut into blocks whose boundaries do
// not depend on the worker count; callers keep one partial result per block
// and combine them in block order, so results are bit-identical for any
// number of workers.

#include <cstddef>
#include <functional>
#include <vector>

namespace ghl {

/// Caps the workers used by parallel_blocks (0 restores the default: the
/// machine's hardware concurrency).
void set_worker_count(int workers);
int worker_count();

struct BlockRange {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

inline std::size_t block_count(std::size_t items, std::size_t block_size) {
  return (items + block_size - 1) / block_size;
}

/// Calls fn(range) once per block of `block_size` consecutive items.
void parallel_blocks(std::size_t items, std::size_t block_size,
                     const std::function<void(const BlockRange&)>& fn);

/// Sum of per-block partials, combined in block order.
template <class T>
T ordered_sum(const std::vector<T>& partials, T zero = T{}) {
  for (const T& p : partials) zero += p;
  return zero;
}

}  // namespace ghl
