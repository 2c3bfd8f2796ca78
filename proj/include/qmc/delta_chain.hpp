#pragma once

#include <cstdint>
#include <vector>

#include "qmc/resolvent.hpp"

namespace qmc {

/// Pi(lambda) on a window, augmented with a cemetery-and-restart state delta.
/// Each state moves to delta with its killing mass; delta restarts at j with
/// probability return_dist[j].
struct DeltaChain {
  EmbeddedMatrix base;
  std::vector<double> return_dist;  // one weight per window state, all > 0, sums to 1
};

/// Return distribution p_j proportional to decay^rank(j) in canonical order.
/// decay must lie in (0, 1).
DeltaChain build_delta_chain(const CompiledWindow& cw, double lambda, double weights_decay = 0.5);
DeltaChain build_delta_chain(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                             double weights_decay = 0.5, Exec exec = Exec::Parallel);

struct ReturnBracket {
  double lower = 0.0;
  double upper = 1.0;
  std::vector<double> hit_lower;  // per-state probability of reaching delta
  std::vector<double> hit_upper;
  std::size_t iterations = 0;
  bool converged = true;
};

/// Probability that the chain started at delta comes back to delta.
/// Hitting probabilities solve h = kill + Pi h on the window; exterior states
/// count as "never returns" for the lower bound and as 1 - L(b) for the
/// upper bound, L being the tail lower bound of the maximal solution.
ReturnBracket return_probability_bracket(const DeltaChain& chain, const BracketOptions& opts = {});

struct EmbeddedVerdictOptions {
  std::vector<std::int64_t> cap_schedule = default_cap_schedule();
  VerdictThresholds thresholds;
  double weights_decay = 0.5;
  BracketOptions bracket;
  std::size_t max_window_states = kDefaultVerdictWindowStates;  // larger caps are dropped with a note
  WindowSeries* windows = nullptr;
};

/// Rules, in order:
///   return upper < 1 - positive at any cap                   -> NonUnique
///   return lower > 1 - zero at the largest cap and
///   non-decreasing along the schedule                        -> Unique
///   deficit -log(1 - return lower) diverging / plateauing    -> Unique / NonUnique
///   otherwise                                                -> Inconclusive
/// CapRecord.lower/upper hold the return-probability bracket.
ChainVerdict uniqueness_verdict_embedded(const GeneratorModel& model, double lambda,
                                         const EmbeddedVerdictOptions& opts = {});

}  // namespace qmc
