#include "qmc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qmc::kernels {

namespace {

inline double row_value(const SweepOperator& op, std::span<const double> cur, std::size_t i) {
  double acc = op.offset[i];
  for (std::size_t k = op.row_start[i]; k < op.row_start[i + 1]; ++k)
    acc += op.weight[k] * cur[op.col[k]];
  return acc;
}

}  // namespace

double sweep_serial(const SweepOperator& op, std::span<const double> cur, std::span<double> next) {
  double change = 0.0;
  for (std::size_t i = 0; i < op.rows(); ++i) {
    next[i] = row_value(op, cur, i);
    change = std::max(change, std::abs(next[i] - cur[i]));
  }
  return change;
}

double sweep_parallel(const SweepOperator& op, std::span<const double> cur,
                      std::span<double> next) {
  double change = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(op.rows());
#pragma omp parallel for schedule(static) reduction(max : change)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    next[r] = row_value(op, cur, r);
    change = std::max(change, std::abs(next[r] - cur[r]));
  }
  return change;
}

double sweep(Exec exec, const SweepOperator& op, std::span<const double> cur,
             std::span<double> next) {
  return exec == Exec::Serial ? sweep_serial(op, cur, next) : sweep_parallel(op, cur, next);
}

void drift_serial(std::span<const std::size_t> row_start, std::span<const std::size_t> col,
                  std::span<const double> rate, std::span<const double> f, std::span<double> out) {
  for (std::size_t i = 0; i + 1 < row_start.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) acc += rate[k] * (f[col[k]] - f[i]);
    out[i] = acc;
  }
}

void drift_parallel(std::span<const std::size_t> row_start, std::span<const std::size_t> col,
                    std::span<const double> rate, std::span<const double> f,
                    std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(row_start.size()) - 1;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    double acc = 0.0;
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) acc += rate[k] * (f[col[k]] - f[i]);
    out[i] = acc;
  }
}

}  // namespace qmc::kernels
