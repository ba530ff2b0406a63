#pragma once

// Data-parallel building blocks. Every kernel has a serial twin in
// kernels::serial with identical results; the serial versions are the
// reference the tests and benchmarks compare against.

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "annimpute/core/grid.hpp"

namespace annimpute::kernels {

// body(i) for i in [0, n). Iterations must write disjoint state. The first
// exception thrown by any iteration is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// out(i, j) = fn(i, j) for every cell, rows split across threads.
template <class Fn>
void fill_cells(RealGrid& out, Fn&& fn) {
  const long long rows = static_cast<long long>(out.rows());
  const std::size_t cols = out.cols();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < cols; ++j) out(r, j) = fn(r, j);
  }
}

// Column means of `data`.
std::vector<double> column_means(const RealGrid& data);

// Sample covariance (divisor rows - 1) of already-centered data.
RealGrid covariance(const RealGrid& centered);

namespace serial {

template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

template <class Fn>
void fill_cells(RealGrid& out, Fn&& fn) {
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = fn(i, j);
  }
}

std::vector<double> column_means(const RealGrid& data);
RealGrid covariance(const RealGrid& centered);

}  // namespace serial

}  // namespace annimpute::kernels
