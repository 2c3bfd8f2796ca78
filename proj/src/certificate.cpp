#include "qmc/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "qmc/error.hpp"

namespace qmc {

std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Uniqueness: return "uniqueness";
    case CertificateKind::CorollaryUniqueness: return "corollary";
    case CertificateKind::NonUniqueness: return "nonuniqueness";
  }
  return "?";
}

std::string_view to_string(Support s) {
  switch (s) {
    case Support::Supported: return "Supported";
    case Support::Violated: return "Violated";
    case Support::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string_view to_string(SeriesClass s) {
  switch (s) {
    case SeriesClass::Diverges: return "Diverges";
    case SeriesClass::Converges: return "Converges";
    case SeriesClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

struct Probe {
  Window window;
  WindowRows rows;
  std::vector<double> phi;    // window states, then boundary states
  std::vector<double> drift;  // per window state
};

Probe probe(const GeneratorModel& model, const StateFunction& phi, std::int64_t level_cap,
            Exec exec, std::size_t max_states, bool require_nonnegative) {
  if (!phi) throw UsageError("certificate has no phi");
  Probe p{enumerate_window(model, level_cap, max_states), {}, {}, {}};
  p.rows = compile_rows(model, p.window, exec);
  const std::size_t n = p.window.size();
  p.phi.resize(n + p.window.boundary.size());
  detail::for_each_index(exec, p.phi.size(), [&](std::size_t k) {
    const StateVec& s = k < n ? p.window.states[k] : p.window.boundary[k - n];
    const double v = phi(s);
    if (!std::isfinite(v)) throw EvaluationError("phi is not finite at " + s.str());
    if (require_nonnegative && v < 0.0)
      throw PreconditionError("phi is negative at " + s.str() + " (value " + std::to_string(v) + ")");
    p.phi[k] = v;
  });
  p.drift.resize(n);
  if (exec == Exec::Serial)
    kernels::drift_serial(p.rows.row_start, p.rows.col, p.rows.rate, p.phi, p.drift);
  else
    kernels::drift_parallel(p.rows.row_start, p.rows.col, p.rows.rate, p.phi, p.drift);
  return p;
}

double tol_abs(const CheckOptions& o, double c, double phi) { return o.tol_rel * (1.0 + std::abs(c * phi)); }

void record(CertificateReport& r, const CheckOptions& o, const StateVec& s, double lhs, double rhs,
            const char* condition) {
  ++r.violation_count;
  if (r.violations.size() < o.max_violations) r.violations.push_back({s, lhs, rhs, condition});
}

// Violations of one condition come out in canonical order; merging several
// conditions keeps that order by state.
void sort_violations(CertificateReport& r, const Window& w) {
  std::stable_sort(r.violations.begin(), r.violations.end(),
                   [&](const Violation& a, const Violation& b) {
                     const auto ia = w.find(a.state), ib = w.find(b.state);
                     return ia.value_or(w.size()) < ib.value_or(w.size());
                   });
}

std::vector<std::int64_t> default_family(std::int64_t cap) {
  std::vector<std::int64_t> f;
  for (std::int64_t d : {8, 4, 2, 1})
    if (cap / d >= 1 && (f.empty() || cap / d > f.back())) f.push_back(cap / d);
  if (f.empty()) f.push_back(cap);
  return f;
}

void check_drift_upper(CertificateReport& r, const Probe& p, double c, const CheckOptions& o) {
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    const double rhs = c * p.phi[i];
    if (p.drift[i] > rhs + tol_abs(o, c, p.phi[i])) record(r, o, p.window.states[i], p.drift[i], rhs, "drift");
  }
}

}  // namespace

CertificateReport check_uniqueness_certificate(const GeneratorModel& model,
                                               const LyapunovCertificate& cert,
                                               std::int64_t level_cap, const CheckOptions& opts) {
  if (cert.kind != CertificateKind::Uniqueness)
    throw PreconditionError("certificate kind must be uniqueness");
  if (level_cap < 0) throw PreconditionError("level cap must be >= 0");
  const auto family = cert.window_family.empty() ? default_family(level_cap) : cert.window_family;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k] < 0 || family[k] > level_cap)
      throw PreconditionError("window family caps must lie in [0, level cap]");
    if (k > 0 && family[k] <= family[k - 1])
      throw PreconditionError("window family must be strictly increasing");
  }
  const Probe p = probe(model, cert.phi, level_cap, opts.exec, opts.max_states, true);
  CertificateReport r;
  r.c = cert.c;
  r.checked_states = p.window.size();
  check_drift_upper(r, p, cert.c, opts);

  const bool everything_declared = cert.rate_bound && !cert.infinite_part;
  if (cert.rate_bound) {
    std::size_t spot = 0;
    for (std::size_t i = 0; i < p.window.size(); ++i) {
      const StateVec& s = p.window.states[i];
      if (cert.infinite_part && !cert.infinite_part(s)) continue;
      ++spot;
      if (p.rows.total_rate[i] > *cert.rate_bound)
        record(r, opts, s, p.rows.total_rate[i], *cert.rate_bound, "rate bound");
    }
    r.notes.push_back("bounded-rate declaration q <= " + std::to_string(*cert.rate_bound) + " on " +
                      (cert.infinite_part ? "the declared infinite part" : "all states") +
                      ", spot-checked on " + std::to_string(spot) + " window states");
  }

  bool growth_ok = true;
  if (everything_declared) {
    // E_n = E: the exterior is empty and its infimum is +inf.
    r.growth_trace.assign(family.size(), std::numeric_limits<double>::infinity());
    r.growth_threshold = opts.growth_floor;
    r.notes.push_back("growth check skipped: E_n = E");
  } else {
    r.growth_trace.assign(family.size(), std::numeric_limits<double>::infinity());
    double inner_max = 0.0;
    for (std::size_t i = 0; i < p.window.size(); ++i) {
      const StateVec& s = p.window.states[i];
      if (cert.infinite_part && cert.infinite_part(s)) continue;
      const auto lvl = s.level();
      if (lvl <= family.front()) inner_max = std::max(inner_max, p.phi[i]);
      for (std::size_t k = 0; k < family.size(); ++k)
        if (lvl == family[k]) r.growth_trace[k] = std::min(r.growth_trace[k], p.phi[i]);
    }
    r.growth_threshold = std::max(opts.growth_floor, 2.0 * inner_max);
    for (std::size_t k = 1; k < family.size(); ++k)
      growth_ok = growth_ok && r.growth_trace[k] >= r.growth_trace[k - 1];
    growth_ok = growth_ok && r.growth_trace.back() > r.growth_threshold;
    if (!growth_ok) r.notes.push_back("phi does not grow enough along the window family");
  }

  sort_violations(r, p.window);
  r.verdict = r.violation_count ? Support::Violated : growth_ok ? Support::Supported : Support::Inconclusive;
  return r;
}

CertificateReport check_corollary_certificate(const GeneratorModel& model, const StateFunction& phi,
                                              double c, std::int64_t level_cap,
                                              const CheckOptions& opts) {
  if (level_cap < 0) throw PreconditionError("level cap must be >= 0");
  const Probe p = probe(model, phi, level_cap, opts.exec, opts.max_states, false);
  CertificateReport r;
  r.c = c;
  r.checked_states = p.window.size();
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    const double q = p.rows.total_rate[i];
    if (p.phi[i] < q - opts.tol_rel * (1.0 + q)) record(r, opts, p.window.states[i], p.phi[i], q, "phi >= q");
  }
  check_drift_upper(r, p, c, opts);
  sort_violations(r, p.window);
  r.verdict = r.violation_count ? Support::Violated : Support::Supported;
  return r;
}

CertificateReport check_nonuniqueness_certificate(const GeneratorModel& model,
                                                  const LyapunovCertificate& cert,
                                                  std::int64_t level_cap, const CheckOptions& opts) {
  if (cert.kind != CertificateKind::NonUniqueness)
    throw PreconditionError("certificate kind must be nonuniqueness");
  if (!(cert.c > 0.0)) throw PreconditionError("nonuniqueness certificate needs c > 0");
  if (!cert.bound || !std::isfinite(*cert.bound))
    throw PreconditionError("nonuniqueness certificate needs a finite bound B");
  if (level_cap < 0) throw PreconditionError("level cap must be >= 0");
  const Probe p = probe(model, cert.phi, level_cap, opts.exec, opts.max_states, false);
  CertificateReport r;
  r.c = cert.c;
  r.checked_states = p.window.size();
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    const StateVec& s = p.window.states[i];
    const double rhs = cert.c * p.phi[i];
    if (p.drift[i] < rhs - tol_abs(opts, cert.c, p.phi[i])) record(r, opts, s, p.drift[i], rhs, "drift");
    if (p.phi[i] > *cert.bound) record(r, opts, s, p.phi[i], *cert.bound, "phi <= B");
    if (p.phi[i] > p.phi[argmax]) argmax = i;
  }
  if (!(p.phi[argmax] > 0.0)) record(r, opts, p.window.states[argmax], p.phi[argmax], 0.0, "sup phi > 0");
  sort_violations(r, p.window);
  r.verdict = r.violation_count ? Support::Violated : Support::Supported;
  return r;
}

std::optional<double> scan_drift_constant(const GeneratorModel& model, const StateFunction& phi,
                                          std::int64_t level_cap, Exec exec) {
  const Probe p = probe(model, phi, level_cap, exec, kDefaultWindowStateCap, true);
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    if (p.phi[i] > 0.0)
      c = std::max(c, p.drift[i] / p.phi[i]);
    else if (p.drift[i] > 0.0)
      return std::nullopt;
  }
  return std::isfinite(c) ? std::optional(c) : std::optional(0.0);
}

std::optional<double> scan_dominating_scale(const GeneratorModel& model, const StateFunction& phi,
                                            std::int64_t level_cap, Exec exec) {
  const Probe p = probe(model, phi, level_cap, exec, kDefaultWindowStateCap, true);
  double gamma = 0.0;
  for (std::size_t i = 0; i < p.window.size(); ++i) {
    const double q = p.rows.total_rate[i];
    if (p.phi[i] > 0.0)
      gamma = std::max(gamma, q / p.phi[i]);
    else if (q > 0.0)
      return std::nullopt;
  }
  return gamma;
}

namespace {

struct Fit {
  double slope = 0.0;
  double halfwidth = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - my - f.slope * (x[k] - mx);
    rss += e * e;
  }
  f.halfwidth = 1.96 * std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

}  // namespace

SeriesReport classify_series(const std::function<double(std::int64_t)>& terms, std::int64_t n_max,
                             const SeriesOptions& opts) {
  if (n_max < 1000) throw PreconditionError("n_max must be >= 1000");
  SeriesReport r;
  r.n_max = n_max;
  const std::int64_t lo = n_max / 2;
  std::vector<double> lx, ly, llx, yb;
  lx.reserve(n_max - lo + 1);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double t = terms(n);
    if (!(t > 0.0) || !std::isfinite(t))
      throw PreconditionError("series term " + std::to_string(n) + " is not a positive finite number");
    r.partial_sum += t;
    if (n >= lo) {
      const double ln = std::log(static_cast<double>(n));
      lx.push_back(ln);
      ly.push_back(std::log(t));
      llx.push_back(std::log(ln));
      yb.push_back(std::log(t) + ln);
    }
  }
  const Fit power = least_squares(lx, ly);
  r.slope = power.slope;
  r.halfwidth = power.halfwidth;
  if (power.slope + power.halfwidth < -(1.0 + opts.margin)) {
    r.verdict = SeriesClass::Converges;
  } else if (power.slope - power.halfwidth > -(1.0 - opts.margin)) {
    r.verdict = SeriesClass::Diverges;
  } else {
    r.beta = -least_squares(llx, yb).slope;
    if (*r.beta <= 1.0 + opts.margin2)
      r.verdict = SeriesClass::Diverges;
    else if (*r.beta >= opts.converge_beta)
      r.verdict = SeriesClass::Converges;
    else
      r.verdict = SeriesClass::Inconclusive;
  }
  return r;
}

SeriesVerdict pure_birth_verdict(const std::function<double(std::int64_t)>& rate, std::int64_t n_max,
                                 const SeriesOptions& opts) {
  SeriesVerdict v;
  v.series = classify_series([&](std::int64_t n) { return 1.0 / rate(n); }, n_max, opts);
  switch (v.series.verdict) {
    case SeriesClass::Diverges: v.evidence = Evidence::Unique; break;
    case SeriesClass::Converges: v.evidence = Evidence::NonUnique; break;
    case SeriesClass::Inconclusive: v.evidence = Evidence::Inconclusive; break;
  }
  return v;
}

}  // namespace qmc
