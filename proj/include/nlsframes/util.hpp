#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nlsframes {

inline int max_threads() {
  if (const char* env = std::getenv("NLS_FRAMES_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks so that
// writes to disjoint rows stay deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int nthreads = std::min<std::size_t>(max_threads(), n);
  if (nthreads <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (int tid = 0; tid < nthreads; ++tid) {
    std::size_t lo = tid * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> v(n);
  double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = a + h * i;
  v.back() = b;
  return v;
}

}  // namespace nlsframes
