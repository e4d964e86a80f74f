#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace crp::detail {

/// Runs fn(i) for i in [0, n) over contiguous chunks, one per hardware
/// thread. fn must write only to slot i of its outputs.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n / 256));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Pairwise (cascade) summation in fixed order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and sd/sqrt(n), shifted by the first value so constant
/// inputs reproduce exactly.
inline MeanAndError mean_and_error(std::span<const double> v) {
  MeanAndError out;
  if (v.empty()) return out;
  const double shift = v[0];
  std::vector<double> tmp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] - shift;
  const double centred = pairwise_sum(tmp) / static_cast<double>(v.size());
  out.mean = shift + centred;
  if (v.size() < 2) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = tmp[i] - centred;
    tmp[i] = d * d;
  }
  const double var = pairwise_sum(tmp) / static_cast<double>(v.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

}  // namespace crp::detail
