#include "qmc/delta_chain.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "qmc/error.hpp"

namespace qmc {

DeltaChain build_delta_chain(const CompiledWindow& cw, double lambda, double weights_decay) {
  if (!(weights_decay > 0.0 && weights_decay < 1.0))
    throw PreconditionError("weights_decay must lie in (0, 1)");
  DeltaChain chain{build_embedded(cw, lambda), {}};
  const std::size_t n = chain.base.size();
  chain.return_dist.resize(n);
  double w = 1.0, total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    chain.return_dist[j] = std::max(w, DBL_MIN);
    total += chain.return_dist[j];
    w *= weights_decay;
  }
  for (auto& p : chain.return_dist) p = std::max(p / total, DBL_TRUE_MIN);
  return chain;
}

DeltaChain build_delta_chain(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                             double weights_decay, Exec exec) {
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be > 0");
  return build_delta_chain(compile_window(model, level_cap, exec), lambda, weights_decay);
}

namespace {

SweepOperator hitting_operator(const EmbeddedMatrix& pi, const std::vector<double>& exterior) {
  SweepOperator op;
  op.row_start = pi.row_start;
  op.col = pi.col;
  op.weight = pi.prob;
  op.offset.resize(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    double acc = pi.killing_mass[i];
    for (std::size_t k = pi.brow_start[i]; k < pi.brow_start[i + 1]; ++k)
      acc += pi.bprob[k] * exterior[pi.bcol[k]];
    op.offset[i] = acc;
  }
  return op;
}

double weighted(const std::vector<double>& p, const std::vector<double>& h) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * h[j];
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

ReturnBracket return_probability_bracket(const DeltaChain& chain, const BracketOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("tol must be > 0");
  const auto& pi = chain.base;
  const std::size_t n = pi.size();
  const auto& window = pi.window();
  std::vector<double> ext_up = exterior_lower_values(window, pi.lambda, opts.tail);
  for (auto& v : ext_up) v = 1.0 - v;
  const SweepOperator lo_op = hitting_operator(pi, std::vector<double>(window.boundary.size(), 0.0));
  const SweepOperator up_op = hitting_operator(pi, ext_up);

  // Lower from 0 increases, upper from 1 decreases.
  std::vector<double> lo(n, 0.0), lo_next(n), up(n, 1.0), up_next(n);
  ReturnBracket out;
  out.converged = false;
  const std::size_t floor_sweeps =
      std::min<std::size_t>(static_cast<std::size_t>(window.level_cap) + 1, opts.max_iter);
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const double dl = kernels::sweep(opts.exec, lo_op, lo, lo_next);
    const double du = kernels::sweep(opts.exec, up_op, up, up_next);
    lo.swap(lo_next);
    up.swap(up_next);
    out.iterations = it;
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, up[i] - lo[i]);
    if (gap < opts.tol || (it >= floor_sweeps && dl < opts.tol && du < opts.tol)) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    up[i] = std::clamp(up[i], 0.0, 1.0);
    lo[i] = std::clamp(std::min(lo[i], up[i]), 0.0, 1.0);
  }
  out.lower = weighted(chain.return_dist, lo);
  out.upper = std::max(out.lower, weighted(chain.return_dist, up));
  out.hit_lower = std::move(lo);
  out.hit_upper = std::move(up);
  return out;
}

ChainVerdict uniqueness_verdict_embedded(const GeneratorModel& model, double lambda,
                                         const EmbeddedVerdictOptions& opts) {
  if (opts.cap_schedule.empty()) throw UsageError("cap schedule is empty");
  for (std::size_t k = 1; k < opts.cap_schedule.size(); ++k)
    if (opts.cap_schedule[k] <= opts.cap_schedule[k - 1])
      throw UsageError("cap schedule must be strictly increasing");

  ChainVerdict v;
  v.lambda = lambda;
  v.thresholds = opts.thresholds;
  v.reference = StateVec::zeros(model.dimension());

  const auto schedule = trim_schedule(opts.cap_schedule, model.dimension(), opts.max_window_states);
  if (schedule.size() < opts.cap_schedule.size())
    v.notes.push_back("caps above " + std::to_string(schedule.back()) + " dropped (more than " +
                      std::to_string(opts.max_window_states) + " states)");
  for (auto cap : schedule) {
    CompiledWindow cw;
    try {
      cw = opts.windows ? opts.windows->get(cap) : compile_window(model, cap, opts.bracket.exec);
    } catch (const RateOverflowError& e) {
      if (v.trace.empty()) throw;
      v.notes.push_back("schedule stopped before cap " + std::to_string(cap) + ": " + e.what());
      break;
    }
    const ReturnBracket rb =
        return_probability_bracket(build_delta_chain(cw, lambda, opts.weights_decay), opts.bracket);
    v.trace.push_back({cap, cw.window->size(), rb.lower, rb.upper, rb.upper - rb.lower,
                       rb.iterations, rb.converged});
  }

  const auto& t = opts.thresholds;
  for (const auto& r : v.trace) {
    if (r.upper < 1.0 - t.positive) {
      v.evidence = Evidence::NonUnique;
      v.rule = "return probability bounded below 1 at cap " + std::to_string(r.cap);
      return v;
    }
  }
  bool non_decreasing = true;
  for (std::size_t k = 1; k < v.trace.size(); ++k)
    non_decreasing = non_decreasing && v.trace[k].lower >= v.trace[k - 1].lower - 1e-12;
  if (v.trace.back().lower > 1.0 - t.zero && non_decreasing) {
    v.evidence = Evidence::Unique;
    v.rule = "return probability above threshold at the largest cap and non-decreasing";
    return v;
  }
  std::vector<double> deficit;
  for (const auto& r : v.trace) deficit.push_back(-std::log1p(-r.lower));
  switch (deficit_trend(deficit, t)) {
    case Trend::Diverging:
      v.evidence = Evidence::Unique;
      v.rule = "escape deficit -log(1 - return lower) diverging along the cap schedule";
      break;
    case Trend::Converging:
      v.evidence = Evidence::NonUnique;
      v.rule = "escape deficit -log(1 - return lower) converging";
      break;
    case Trend::Undecided:
      v.evidence = Evidence::Inconclusive;
      v.rule = "no rule fired";
      break;
  }
  return v;
}

}  // namespace qmc
