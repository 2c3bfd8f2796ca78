#pragma once

#include <cstdint>

namespace qmc {

inline constexpr std::int64_t kPrimeTableSize = 400'000;

/// n-th prime, 1-based (nth_prime(1) == 2). Throws ModelError outside
/// [1, kPrimeTableSize]. The table is built once on first use.
std::int64_t nth_prime(std::int64_t n);

}  // namespace qmc
