#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qmc {

enum class Exec { Serial, Parallel };

/// Affine map next = offset + A * cur with A in CSR form, all entries >= 0.
struct SweepOperator {
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> col;
  std::vector<double> weight;
  std::vector<double> offset;

  std::size_t rows() const noexcept { return offset.size(); }
};

namespace kernels {

// Jacobi sweep: reads only `cur`, writes only `next`, returns sup |next - cur|.
// The serial and parallel variants produce bit-identical `next`.
double sweep_serial(const SweepOperator& op, std::span<const double> cur, std::span<double> next);
double sweep_parallel(const SweepOperator& op, std::span<const double> cur, std::span<double> next);
double sweep(Exec exec, const SweepOperator& op, std::span<const double> cur,
             std::span<double> next);

// Generator drift on a compiled window: out[i] = sum_k rate_k (f[col_k] - f[i]),
// where f holds window values followed by boundary values.
void drift_serial(std::span<const std::size_t> row_start, std::span<const std::size_t> col,
                  std::span<const double> rate, std::span<const double> f, std::span<double> out);
void drift_parallel(std::span<const std::size_t> row_start, std::span<const std::size_t> col,
                    std::span<const double> rate, std::span<const double> f,
                    std::span<double> out);

}  // namespace kernels
}  // namespace qmc
