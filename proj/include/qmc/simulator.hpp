#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qmc/generator.hpp"
#include "qmc/kernels.hpp"

namespace qmc {

/// Counter-based uniform stream: draw k of stream (seed, trial) depends only
/// on (seed, trial, k).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial);
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Exponential with the given rate, by inverse CDF.
  double exponential(double rate);
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class PathEnd { Absorbed, TimeCapReached, JumpCapReached };
std::string_view to_string(PathEnd e);

struct JumpPath {
  std::vector<StateVec> states;      // X(tau_0), X(tau_1), ...
  std::vector<double> jump_times;    // tau_0 = 0 < tau_1 < ...
  std::vector<double> inverse_terms; // 1/q at each visited state with q > 0
  double inverse_rate_sum = 0.0;
  double elapsed = 0.0;              // time of the last jump
  PathEnd terminal = PathEnd::TimeCapReached;
  std::string diagnostic;            // set when the path left the representable range
};

struct SimulationCaps {
  double t_max = 10.0;
  std::size_t max_jumps = 100'000;
};

/// Jump chain of the minimal process from `initial`, fully determined by
/// (model, initial, seed, trial, caps).
JumpPath simulate_path(const GeneratorModel& model, const StateVec& initial, std::uint64_t seed,
                       const SimulationCaps& caps, std::uint64_t trial = 0);

inline constexpr double kDefaultExplosionEpsilon = 1e-4;

/// Numerically summable signature: the jump cap was hit and the last half of
/// the 1/q terms adds up to less than epsilon.
bool flag_explosive(const JumpPath& path, double epsilon = kDefaultExplosionEpsilon);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct ExplosionEstimate {
  std::size_t trials = 0;
  std::size_t flagged = 0;
  std::size_t absorbed = 0, time_capped = 0, jump_capped = 0, overflowed = 0;
  double fraction = 0.0;
  WilsonInterval interval;
  double epsilon = kDefaultExplosionEpsilon;
  SimulationCaps caps;
  std::uint64_t seed = 0;
};

/// Independent trials with per-trial streams; counts do not depend on the
/// execution policy or thread count.
ExplosionEstimate estimate_explosion_probability(const GeneratorModel& model,
                                                 const StateVec& initial, const SimulationCaps& caps,
                                                 std::size_t trials, std::uint64_t seed,
                                                 double epsilon = kDefaultExplosionEpsilon,
                                                 Exec exec = Exec::Parallel);

/// CSV rows: n, tau_n, x0..x{d-1}, inv_q, prefix_sum.
void write_path_csv(std::ostream& os, const JumpPath& path);

}  // namespace qmc
