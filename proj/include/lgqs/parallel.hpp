#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace lgqs {

/// Evaluates f(i) for i in [0, n) serially. Reference for `parallel_map`.
template <class F>
auto serial_map(std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  std::vector<std::invoke_result_t<F&, std::size_t>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

/// Evaluates f(i) for i in [0, n) on the OpenMP team; results are index-ordered, so the
/// output does not depend on the thread count. The first exception thrown is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  std::exception_ptr error;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lgqs_parallel_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Sets the OpenMP team size; n <= 0 keeps the runtime default.
inline void set_worker_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int worker_count() { return omp_get_max_threads(); }

}  // namespace lgqs
