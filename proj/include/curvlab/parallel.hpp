// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace curvlab {

/// Worker count: CURVLAB_THREADS if set, otherwise hardware concurrency
/// clamped to [1, 8].
inline int thread_count() {
  if (const char* env = std::getenv("CURVLAB_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return std::min(k, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Evaluate fn(i) for i in [0, count) across workers and return the results
// in index order. The reduction order is fixed by index, so results do not
// depend on the number of workers.
template <typename T>
std::vector<T> parallel_indexed(int count, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < count; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

}  // namespace curvlab
