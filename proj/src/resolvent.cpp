#include "qmc/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qmc/error.hpp"

namespace qmc {

CompiledWindow compile_window(const GeneratorModel& model, std::int64_t level_cap, Exec exec,
                              std::size_t max_states) {
  auto window = std::make_shared<const Window>(enumerate_window(model, level_cap, max_states));
  auto rows = std::make_shared<const WindowRows>(compile_rows(model, *window, exec));
  return {std::move(window), std::move(rows)};
}

WindowSeries::WindowSeries(GeneratorModel model, Exec exec, std::size_t max_states)
    : model_(std::move(model)), exec_(exec), max_states_(max_states) {}

CompiledWindow WindowSeries::get(std::int64_t level_cap) {
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(level_cap); it != cache_.end()) return it->second;
  auto cw = compile_window(model_, level_cap, exec_, max_states_);
  cache_.emplace(level_cap, cw);
  return cw;
}

EmbeddedMatrix build_embedded(const CompiledWindow& cw, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw PreconditionError("lambda must be a finite positive number");
  const auto& rows = *cw.rows;
  const std::size_t n = rows.rows();
  EmbeddedMatrix pi;
  pi.source = cw;
  pi.lambda = lambda;
  pi.interior_mass.assign(n, 0.0);
  pi.boundary_mass.assign(n, 0.0);
  pi.killing_mass.assign(n, 0.0);
  pi.row_start.assign(n + 1, 0);
  pi.brow_start.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = lambda + rows.total_rate[i];
    for (std::size_t k = rows.row_start[i]; k < rows.row_start[i + 1]; ++k) {
      const double p = rows.rate[k] / denom;
      if (rows.col[k] < n) {
        pi.col.push_back(rows.col[k]);
        pi.prob.push_back(p);
        pi.interior_mass[i] += p;
      } else {
        pi.bcol.push_back(rows.col[k] - n);
        pi.bprob.push_back(p);
        pi.boundary_mass[i] += p;
      }
    }
    pi.killing_mass[i] = lambda / denom;
    pi.row_start[i + 1] = pi.col.size();
    pi.brow_start[i + 1] = pi.bcol.size();
  }
  return pi;
}

EmbeddedMatrix build_embedded(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                              Exec exec) {
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be > 0");
  return build_embedded(compile_window(model, level_cap, exec), lambda);
}

std::vector<double> exterior_lower_values(const Window& window, double lambda,
                                          const ExplosionTimeBound& tail) {
  std::vector<double> out(window.boundary.size(), 0.0);
  if (!tail) return out;
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double t = tail(window.boundary[b]);
    if (std::isnan(t) || t < 0.0)
      throw EvaluationError("explosion-time bound is invalid at " + window.boundary[b].str());
    out[b] = std::max(0.0, 1.0 - lambda * t);
  }
  return out;
}

namespace {

SweepOperator interior_operator(const EmbeddedMatrix& pi, std::span<const double> exterior,
                                std::span<const double> source) {
  SweepOperator op;
  op.row_start = pi.row_start;
  op.col = pi.col;
  op.weight = pi.prob;
  op.offset.assign(pi.size(), 0.0);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    double acc = source.empty() ? 0.0 : source[i];
    for (std::size_t k = pi.brow_start[i]; k < pi.brow_start[i + 1]; ++k)
      acc += pi.bprob[k] * exterior[pi.bcol[k]];
    op.offset[i] = acc;
  }
  return op;
}

// Minimum sweep count: enough for boundary data to reach every level.
std::size_t min_sweeps(const EmbeddedMatrix& pi) {
  return static_cast<std::size_t>(pi.window().level_cap) + 1;
}

// States with no path to the boundary: there the window problem has only the
// zero solution.
std::vector<char> reaches_boundary(const EmbeddedMatrix& pi) {
  const std::size_t n = pi.size();
  std::vector<std::size_t> in_start(n + 1, 0), in_col(pi.col.size());
  for (auto c : pi.col) ++in_start[c + 1];
  for (std::size_t i = 0; i < n; ++i) in_start[i + 1] += in_start[i];
  std::vector<std::size_t> fill(in_start.begin(), in_start.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = pi.row_start[i]; k < pi.row_start[i + 1]; ++k) in_col[fill[pi.col[k]]++] = i;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (pi.boundary_mass[i] > 0.0) {
      seen[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const std::size_t j = stack.back();
    stack.pop_back();
    for (std::size_t k = in_start[j]; k < in_start[j + 1]; ++k)
      if (!seen[in_col[k]]) {
        seen[in_col[k]] = 1;
        stack.push_back(in_col[k]);
      }
  }
  return seen;
}

}  // namespace

SolutionBracket maximal_solution_bracket(const EmbeddedMatrix& pi, const BracketOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("tol must be > 0");
  const std::size_t n = pi.size();
  const auto& window = pi.window();
  const std::vector<double> ones(window.boundary.size(), 1.0);
  const std::vector<double> ext_lower = exterior_lower_values(window, pi.lambda, opts.tail);
  const SweepOperator up_op = interior_operator(pi, ones, {});
  const SweepOperator lo_op = interior_operator(pi, ext_lower, {});

  std::vector<double> up(n, 1.0), up_next(n), lo(n, 0.0), lo_next(n);
  const auto open = reaches_boundary(pi);
  for (std::size_t i = 0; i < n; ++i)
    if (!open[i]) up[i] = 0.0;
  SolutionBracket br;
  br.converged = false;
  const std::size_t floor_sweeps = std::min(min_sweeps(pi), opts.max_iter);
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const double du = kernels::sweep(opts.exec, up_op, up, up_next);
    const double dl = kernels::sweep(opts.exec, lo_op, lo, lo_next);
    up.swap(up_next);
    lo.swap(lo_next);
    br.iterations = it;
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, up[i] - lo[i]);
    if (gap < opts.tol || (it >= floor_sweeps && du < opts.tol && dl < opts.tol)) {
      br.converged = true;
      break;
    }
  }
  // Rounding can push the two sequences across each other by an ulp.
  for (std::size_t i = 0; i < n; ++i) {
    up[i] = std::clamp(up[i], 0.0, 1.0);
    lo[i] = std::clamp(std::min(lo[i], up[i]), 0.0, 1.0);
  }
  br.gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) br.gap = std::max(br.gap, up[i] - lo[i]);
  br.upper = std::move(up);
  br.lower = std::move(lo);
  return br;
}

SolutionBracket maximal_solution_bracket(const GeneratorModel& model, double lambda,
                                         std::int64_t level_cap, const BracketOptions& opts) {
  return maximal_solution_bracket(build_embedded(model, lambda, level_cap, opts.exec), opts);
}

ResolventMass resolvent_mass(const EmbeddedMatrix& pi, std::size_t n_terms, Exec exec) {
  if (n_terms < 1) throw PreconditionError("n_terms must be >= 1");
  const std::size_t n = pi.size();
  const std::vector<double> zeros(pi.window().boundary.size(), 0.0);
  const SweepOperator op = interior_operator(pi, zeros, pi.killing_mass);
  std::vector<double> m(n, 0.0), next(n);
  ResolventMass out;
  const std::size_t floor_terms = min_sweeps(pi);
  for (std::size_t t = 1; t <= n_terms; ++t) {
    const double change = kernels::sweep(exec, op, m, next);
    m.swap(next);
    out.terms = t;
    if (t >= floor_terms && change < 1e-15) break;
  }
  for (auto& v : m) v = std::clamp(v, 0.0, 1.0);
  out.mass = std::move(m);
  return out;
}

ResolventMass resolvent_mass(const GeneratorModel& model, double lambda, std::int64_t level_cap,
                             std::size_t n_terms, Exec exec) {
  return resolvent_mass(build_embedded(model, lambda, level_cap, exec), n_terms, exec);
}

ChainVerdict uniqueness_verdict_resolvent(const GeneratorModel& model, double lambda,
                                          const ChainVerdictOptions& opts) {
  if (opts.cap_schedule.empty()) throw UsageError("cap schedule is empty");
  if (!std::is_sorted(opts.cap_schedule.begin(), opts.cap_schedule.end()) ||
      std::adjacent_find(opts.cap_schedule.begin(), opts.cap_schedule.end()) != opts.cap_schedule.end())
    throw UsageError("cap schedule must be strictly increasing");

  ChainVerdict v;
  v.lambda = lambda;
  v.thresholds = opts.thresholds;
  v.reference = opts.reference.value_or(StateVec::zeros(model.dimension()));

  const auto schedule = trim_schedule(opts.cap_schedule, model.dimension(), opts.max_window_states);
  if (schedule.size() < opts.cap_schedule.size())
    v.notes.push_back("caps above " + std::to_string(schedule.back()) + " dropped (more than " +
                      std::to_string(opts.max_window_states) + " states)");
  for (auto cap : schedule) {
    CompiledWindow cw;
    try {
      cw = opts.windows ? opts.windows->get(cap) : compile_window(model, cap, opts.bracket.exec);
    } catch (const RateOverflowError& e) {
      // Rates overflow beyond some level: keep what the smaller caps showed.
      if (v.trace.empty()) throw;
      v.notes.push_back("schedule stopped before cap " + std::to_string(cap) + ": " + e.what());
      break;
    }
    const auto ref = cw.window->find(v.reference);
    if (!ref) throw UsageError("reference state " + v.reference.str() + " is outside the window of cap " + std::to_string(cap));
    const SolutionBracket br = maximal_solution_bracket(build_embedded(cw, lambda), opts.bracket);
    v.trace.push_back({cap, cw.window->size(), br.lower[*ref], br.upper[*ref], br.gap, br.iterations, br.converged});
  }

  const auto& t = opts.thresholds;
  for (const auto& r : v.trace) {
    if (r.lower > t.positive) {
      v.evidence = Evidence::NonUnique;
      v.rule = "lower bracket above threshold at cap " + std::to_string(r.cap);
      return v;
    }
  }
  bool non_increasing = true;
  for (std::size_t k = 1; k < v.trace.size(); ++k)
    non_increasing = non_increasing && v.trace[k].upper <= v.trace[k - 1].upper + 1e-12;
  if (v.trace.back().upper < t.zero && non_increasing) {
    v.evidence = Evidence::Unique;
    v.rule = "upper bracket below threshold and non-increasing";
    return v;
  }
  std::vector<double> deficit;
  for (const auto& r : v.trace) deficit.push_back(-std::log(r.upper));
  switch (deficit_trend(deficit, t)) {
    case Trend::Diverging:
      v.evidence = Evidence::Unique;
      v.rule = "deficit -log upper diverging along the cap schedule";
      break;
    case Trend::Converging:
      v.evidence = Evidence::NonUnique;
      v.rule = "deficit -log upper converging (upper bracket plateaus above zero)";
      break;
    case Trend::Undecided:
      v.evidence = Evidence::Inconclusive;
      v.rule = "no rule fired";
      break;
  }
  return v;
}

}  // namespace qmc
