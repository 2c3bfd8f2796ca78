#include "qmc/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "qmc/error.hpp"

namespace qmc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial)
    : key_(mix64(seed ^ mix64(trial ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential(double rate) { return -std::log(uniform()) / rate; }

std::string_view to_string(PathEnd e) {
  switch (e) {
    case PathEnd::Absorbed: return "Absorbed";
    case PathEnd::TimeCapReached: return "TimeCapReached";
    case PathEnd::JumpCapReached: return "JumpCapReached";
  }
  return "?";
}

namespace {

// Shared walk; `keep_states` off records only the 1/q terms.
JumpPath walk(const GeneratorModel& model, const StateVec& initial, std::uint64_t seed,
              std::uint64_t trial, const SimulationCaps& caps, bool keep_states) {
  if (!(caps.t_max > 0.0)) throw PreconditionError("t_max must be > 0");
  if (caps.max_jumps < 1) throw PreconditionError("max_jumps must be >= 1");
  if (initial.dim() != model.dimension()) throw UsageError("initial state has the wrong dimension");

  CounterRng rng(seed, trial);
  JumpPath path;
  StateVec x = initial;
  double t = 0.0;
  std::size_t jumps = 0;
  std::vector<Transition> row;
  path.states.push_back(x);
  path.jump_times.push_back(0.0);
  for (;;) {
    double q = 0.0;
    try {
      model.transitions_into(x, row);
      for (const auto& tr : row) q += tr.rate;
      if (std::isinf(q)) throw RateOverflowError("total rate overflows at state " + x.str());
    } catch (const RateOverflowError& e) {
      path.terminal = PathEnd::JumpCapReached;
      path.diagnostic = e.what();
      break;
    }
    if (q == 0.0) {
      path.terminal = PathEnd::Absorbed;
      break;
    }
    path.inverse_terms.push_back(1.0 / q);
    path.inverse_rate_sum += 1.0 / q;
    if (jumps == caps.max_jumps) {
      path.terminal = PathEnd::JumpCapReached;
      break;
    }
    const double hold = rng.exponential(q);
    if (t + hold > caps.t_max) {
      path.terminal = PathEnd::TimeCapReached;
      break;
    }
    // A holding time below the spacing of doubles at t would repeat a jump time.
    const double next_t = t + hold > t ? t + hold : std::nextafter(t, std::numeric_limits<double>::infinity());
    const double pick = rng.uniform() * q;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < row.size(); ++k) {
      acc += row[k].rate;
      if (pick < acc) break;
    }
    x = row[k].target;
    t = next_t;
    ++jumps;
    if (keep_states) {
      path.states.push_back(x);
      path.jump_times.push_back(t);
    }
  }
  path.elapsed = t;
  return path;
}

}  // namespace

JumpPath simulate_path(const GeneratorModel& model, const StateVec& initial, std::uint64_t seed,
                       const SimulationCaps& caps, std::uint64_t trial) {
  return walk(model, initial, seed, trial, caps, true);
}

bool flag_explosive(const JumpPath& path, double epsilon) {
  if (path.terminal != PathEnd::JumpCapReached) return false;
  const auto& terms = path.inverse_terms;
  if (terms.empty()) return false;
  double tail = 0.0;
  for (std::size_t k = terms.size() / 2; k < terms.size(); ++k) tail += terms[k];
  return tail < epsilon;
}

WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  // exact at k = 0 and k = n
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

ExplosionEstimate estimate_explosion_probability(const GeneratorModel& model,
                                                 const StateVec& initial, const SimulationCaps& caps,
                                                 std::size_t trials, std::uint64_t seed,
                                                 double epsilon, Exec exec) {
  if (trials < 1) throw PreconditionError("trials must be >= 1");
  std::vector<unsigned char> flagged(trials, 0);
  std::vector<PathEnd> ends(trials);
  std::vector<unsigned char> overflow(trials, 0);
  auto one = [&](std::size_t k) {
    const JumpPath p = walk(model, initial, seed, k, caps, false);
    flagged[k] = flag_explosive(p, epsilon);
    ends[k] = p.terminal;
    overflow[k] = !p.diagnostic.empty();
  };
  if (exec == Exec::Serial) {
    for (std::size_t k = 0; k < trials; ++k) one(k);
  } else {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t k = 0; k < trials; ++k) {
      try {
        one(k);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }
  ExplosionEstimate est;
  est.trials = trials;
  est.epsilon = epsilon;
  est.caps = caps;
  est.seed = seed;
  for (std::size_t k = 0; k < trials; ++k) {
    est.flagged += flagged[k];
    est.overflowed += overflow[k];
    switch (ends[k]) {
      case PathEnd::Absorbed: ++est.absorbed; break;
      case PathEnd::TimeCapReached: ++est.time_capped; break;
      case PathEnd::JumpCapReached: ++est.jump_capped; break;
    }
  }
  est.fraction = static_cast<double>(est.flagged) / static_cast<double>(trials);
  est.interval = wilson_interval(est.flagged, trials);
  return est;
}

void write_path_csv(std::ostream& os, const JumpPath& path) {
  const std::size_t d = path.states.empty() ? 0 : path.states.front().dim();
  os << "n,tau";
  for (std::size_t u = 0; u < d; ++u) os << ",x" << u;
  os << ",inv_q,prefix_sum\n";
  os << std::setprecision(17);
  double prefix = 0.0;
  for (std::size_t n = 0; n < path.states.size(); ++n) {
    os << n << ',' << path.jump_times[n];
    for (std::size_t u = 0; u < d; ++u) os << ',' << path.states[n][u];
    if (n < path.inverse_terms.size()) {
      prefix += path.inverse_terms[n];
      os << ',' << path.inverse_terms[n] << ',' << prefix << '\n';
    } else {
      os << ",,\n";
    }
  }
}

}  // namespace qmc
