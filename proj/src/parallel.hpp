#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include "qmc/kernels.hpp"

namespace qmc::detail {

// Runs body(i) for i in [0, n). Exceptions thrown inside the OpenMP region are
// captured and the one with the smallest index is rethrown after the loop,
// so both policies report the same error.
template <typename Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace qmc::detail
