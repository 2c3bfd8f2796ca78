#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmc/state.hpp"

namespace qmc {

enum class Evidence { Unique, NonUnique, Inconclusive };

std::string_view to_string(Evidence e);

struct VerdictThresholds {
  double positive = 1e-3;        // lower bracket above this certifies a nonzero solution
  double zero = 1e-3;            // upper bracket below this counts as "solution is zero"
  double ratio_diverge = 0.85;   // block-increment ratio of the deficit for "diverging"
  double ratio_converge = 0.75;  // ... and for "converging"
  double plateau = 1e-12;        // deficit increment treated as zero
};

enum class Trend { Diverging, Converging, Undecided };

std::string_view to_string(Trend t);

/// Classifies a deficit sequence D_k (nondecreasing in k, sampled on a doubling
/// schedule) by its block increments d_k = D_k - D_{k-1}. Diverging when the
/// last two ratios d_k/d_{k-1} are both >= ratio_diverge, Converging when both
/// are <= ratio_converge or the last increment is below `plateau`.
Trend deficit_trend(std::span<const double> deficits, const VerdictThresholds& t);

/// Per-cap record of a bracket run at the reference state.
struct CapRecord {
  std::int64_t cap = 0;
  std::size_t states = 0;
  double lower = 0.0;
  double upper = 1.0;
  double gap = 0.0;  // sup over window of upper - lower
  std::size_t iterations = 0;
  bool converged = true;
};

struct ChainVerdict {
  Evidence evidence = Evidence::Inconclusive;
  std::string rule;
  double lambda = 1.0;
  StateVec reference;
  VerdictThresholds thresholds;
  std::vector<CapRecord> trace;
  std::vector<std::string> notes;  // e.g. schedule cut short by rate overflow
};

std::vector<std::int64_t> default_cap_schedule();

inline constexpr std::size_t kDefaultVerdictWindowStates = 100'000;

/// Leading caps of `caps` whose windows in dimension `dim` hold at most
/// `max_states` states. ResourceError when not even the first cap fits.
std::vector<std::int64_t> trim_schedule(std::span<const std::int64_t> caps, std::size_t dim,
                                        std::size_t max_states);

}  // namespace qmc
