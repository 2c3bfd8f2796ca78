#include "qmc/primes.hpp"

#include <string>
#include <vector>

#include "qmc/error.hpp"

namespace qmc {

namespace {

std::vector<std::int64_t> build_table() {
  // p_400000 = 5,800,079
  constexpr std::int64_t limit = 5'900'000;
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::int64_t> primes;
  primes.reserve(kPrimeTableSize);
  for (std::int64_t p = 2; p <= limit && static_cast<std::int64_t>(primes.size()) < kPrimeTableSize; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::int64_t m = p * p; m <= limit; m += p) composite[m] = true;
  }
  return primes;
}

}  // namespace

std::int64_t nth_prime(std::int64_t n) {
  static const std::vector<std::int64_t> table = build_table();
  if (n < 1 || n > static_cast<std::int64_t>(table.size()))
    throw ModelError("prime(" + std::to_string(n) + ") is outside the prime table (1.." +
                     std::to_string(table.size()) + ")");
  return table[static_cast<std::size_t>(n - 1)];
}

}  // namespace qmc
