// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qmc/analysis.hpp"
#include "qmc/certificate.hpp"
#include "qmc/delta_chain.hpp"
#include "qmc/dsl.hpp"
#include "qmc/error.hpp"
#include "qmc/primes.hpp"
#include "qmc/resolvent.hpp"
#include "qmc/simulator.hpp"
#include "qmc/window.hpp"
#include "qmc/zoo.hpp"

using namespace qmc;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  void info(const std::string& line) { info_.push_back(line); }

  bool report(double seconds) const {
    const bool ok = failures_.empty() && checks_ > 0;
    std::printf("criterion %d %s  %s (%zu checks, %.1f s)\n", id_, ok ? "PASS" : "FAIL", title_.c_str(), checks_,
                seconds);
    for (const auto& l : info_) std::printf("    %s\n", l.c_str());
    for (const auto& f : failures_) std::printf("    failed: %s\n", f.c_str());
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> info_;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string models_dir() { return QMC_MODELS_DIR; }

const char* name_of(Evidence e) { return std::string_view(to_string(e)).data(); }

// ---- 1 ----

void pure_birth_series(Criterion& c) {
  struct Case {
    const char* name;
    std::function<double(std::int64_t)> rate;
    Evidence expected;
  };
  const std::vector<Case> cases = {
      {"n+1", [](std::int64_t n) { return n + 1.0; }, Evidence::Unique},
      {"p_n", [](std::int64_t n) { return static_cast<double>(nth_prime(n + 1)); }, Evidence::Unique},
      {"(n+1)^2", [](std::int64_t n) { return (n + 1.0) * (n + 1.0); }, Evidence::NonUnique},
      {"(n+1)log^2(n+2)",
       [](std::int64_t n) {
         const double l = std::log(n + 2.0);
         return (n + 1.0) * l * l;
       },
       Evidence::NonUnique},
  };
  int inconclusive = 0;
  for (const auto& k : cases) {
    const auto v = pure_birth_verdict(k.rate, 100'000);
    inconclusive += v.evidence == Evidence::Inconclusive;
    c.check(v.evidence == k.expected, fmt("%s: got %s", k.name, name_of(v.evidence)));
    c.info(fmt("%-16s %-10s partial sum %.6g", k.name, name_of(v.evidence), v.series.partial_sum));
  }
  c.check(inconclusive == 0, fmt("%d inconclusive", inconclusive));
}

// ---- 2 ----

void resolvent_brackets(Criterion& c) {
  const auto linear = zoo::make("linear-birth");
  for (std::int64_t n : {10, 100, 1000}) {
    // n factors: levels 0..n-1
    const auto b = maximal_solution_bracket(linear.model, 1.0, n - 1, {.tail = linear.tail});
    const double want = 1.0 / static_cast<double>(n + 1);
    const double product = oracle::birth_product([](std::int64_t k) { return k + 1.0; }, 1.0, n);
    c.check(std::abs(b.upper[0] - want) <= 1e-10, fmt("linear N=%lld: upper %.15g vs %.15g", (long long)n, b.upper[0], want));
    c.check(std::abs(product - want) <= 1e-12, fmt("product oracle N=%lld: %.15g", (long long)n, product));
    c.info(fmt("linear N=%-5lld upper(0) = %.15g, 1/(N+1) = %.15g", (long long)n, b.upper[0], want));
  }

  const auto exp2 = zoo::make("exp2-birth");
  const auto b = maximal_solution_bracket(exp2.model, 1.0, 60, {.tail = exp2.tail});
  const double gap = b.upper[0] - b.lower[0];
  c.check(gap < 1e-8, fmt("exp2 cap 60 gap %.3g", gap));
  c.check(b.lower[0] > 0.1, fmt("exp2 cap 60 lower %.6g", b.lower[0]));
  const auto rate = [](std::int64_t k) { return std::ldexp(1.0, static_cast<int>(k)); };
  const double product = oracle::birth_product(rate, 1.0, 61);
  const auto dense = oracle::window_solve(exp2.model, 1.0, 60, [](const StateVec&) { return 1.0; });
  c.check(std::abs(dense[0] - b.upper[0]) < 1e-10, fmt("exp2 dense oracle %.15g vs %.15g", dense[0], b.upper[0]));
  c.check(std::abs(product - b.upper[0]) < 1e-10, fmt("exp2 product oracle %.15g vs %.15g", product, b.upper[0]));
  constexpr double kGoldenUpper = 0.20971122089755384;
  constexpr double kGoldenLower = 0.20971122089755384;
  c.check(std::abs(b.upper[0] - kGoldenUpper) < 1e-12, fmt("exp2 upper golden drift: %.17g", b.upper[0]));
  c.check(std::abs(b.lower[0] - kGoldenLower) < 1e-12, fmt("exp2 lower golden drift: %.17g", b.lower[0]));
  c.info(fmt("exp2 cap 60: lower(0) = %.17g, upper(0) = %.17g, gap %.3g", b.lower[0], b.upper[0], gap));
}

// ---- 3, 4 ----

Evidence expected_evidence(const zoo::Fixture& fx) {
  return fx.expected == zoo::Expected::Unique ? Evidence::Unique : Evidence::NonUnique;
}

void cross_method(Criterion& c) {
  for (const auto& fx : zoo::grid_fixtures()) {
    AnalysisConfig cfg;
    cfg.source.zoo_name = fx.name;
    cfg.methods = {Method::Resolvent, Method::Embedded, Method::Simulate};
    cfg.seed = 2024;
    cfg.trials = 200;
    cfg.simulation = {5.0, 100'000};
    const auto r = run_analysis(cfg);
    const Evidence want = expected_evidence(fx);
    std::string row = fmt("%-16s", fx.name.c_str());
    for (const auto& m : r.methods) {
      c.check(!m.failed && m.evidence == want,
              fmt("%s %s: %s %s", fx.name.c_str(), std::string(to_string(m.method)).c_str(), name_of(m.evidence),
                  m.error.c_str()));
      row += fmt(" %-10s", name_of(m.evidence));
    }
    c.check(r.overall != Overall::Contradictory, fx.name + ": Contradictory");
    c.check(r.overall == (want == Evidence::Unique ? Overall::Unique : Overall::NonUnique),
            fx.name + ": overall " + std::string(to_string(r.overall)));
    c.info(row + "-> " + std::string(to_string(r.overall)));
  }
}

void lambda_independence(Criterion& c) {
  for (const auto& fx : zoo::grid_fixtures()) {
    WindowSeries windows(fx.model);
    std::string row = fmt("%-16s", fx.name.c_str());
    for (double lambda : {0.5, 1.0, 2.0}) {
      ChainVerdictOptions ro;
      ro.bracket.tail = fx.tail;
      ro.windows = &windows;
      EmbeddedVerdictOptions eo;
      eo.bracket.tail = fx.tail;
      eo.windows = &windows;
      const auto a = uniqueness_verdict_resolvent(fx.model, lambda, ro);
      const auto b = uniqueness_verdict_embedded(fx.model, lambda, eo);
      c.check(a.evidence == expected_evidence(fx),
              fmt("%s resolvent at lambda %g: %s", fx.name.c_str(), lambda, name_of(a.evidence)));
      c.check(b.evidence == expected_evidence(fx),
              fmt("%s embedded at lambda %g: %s", fx.name.c_str(), lambda, name_of(b.evidence)));
      row += fmt(" %g:%s/%s", lambda, name_of(a.evidence), name_of(b.evidence));
    }
    c.info(row);
  }
}

// ---- 5 ----

double level1(const StateVec& s) { return 1.0 + static_cast<double>(s.level()); }

void certificates(Criterion& c) {
  const auto s2 = zoo::make("schlogl-2").model;

  // (a)
  const auto ca = scan_drift_constant(s2, level1, 300);
  c.check(ca.has_value(), "(a) drift scan failed");
  if (ca) {
    LyapunovCertificate cert{level1, *ca};
    const auto r = check_uniqueness_certificate(s2, cert, 300);
    c.check(r.verdict == Support::Supported, fmt("(a) %s", std::string(to_string(r.verdict)).c_str()));
    c.info(fmt("(a) schlogl-2, phi = 1+level, c = %.6g: %s on %zu states", *ca,
               std::string(to_string(r.verdict)).c_str(), r.checked_states));
  }

  // (b)
  const StateFunction cubic = [](const StateVec& s) { return 1.0 + std::pow(s[0], 3) + std::pow(s[1], 3); };
  const auto gamma = scan_dominating_scale(s2, cubic, 100);
  c.check(gamma.has_value(), "(b) gamma scan failed");
  if (gamma) {
    const StateFunction phi = [g = *gamma, cubic](const StateVec& s) { return g * cubic(s); };
    const auto cb = scan_drift_constant(s2, phi, 100);
    c.check(cb.has_value(), "(b) drift scan failed");
    if (cb) {
      const auto r = check_corollary_certificate(s2, phi, *cb, 100);
      c.check(r.verdict == Support::Supported, fmt("(b) %s", std::string(to_string(r.verdict)).c_str()));
      c.info(fmt("(b) schlogl-2, gamma = %.6g, c = %.6g: %s on %zu states", *gamma, *cb,
                 std::string(to_string(r.verdict)).c_str(), r.checked_states));
    }
  }

  // (c)
  const auto lin = zoo::make("linear-birth").model;
  const StateFunction harmonic = [](const StateVec& s) {
    double h = 1.0;
    for (std::int64_t j = 0; j < s[0]; ++j) h += 1.0 / (j + 1.0);
    return h;
  };
  for (double cc : {0.5, 1.0, 4.0}) {
    const auto r = check_corollary_certificate(lin, harmonic, cc, 1000);
    const bool dominated_fail = r.verdict == Support::Violated &&
                                std::any_of(r.violations.begin(), r.violations.end(),
                                            [](const Violation& v) { return v.condition == "phi >= q"; });
    c.check(dominated_fail, fmt("(c) corollary with harmonic phi, c = %g: %s", cc, std::string(to_string(r.verdict)).c_str()));
  }
  const auto r1 = check_uniqueness_certificate(lin, LyapunovCertificate{level1, 1.0}, 10'000);
  c.check(r1.verdict == Support::Supported, fmt("(c) 1+level on linear birth: %s", std::string(to_string(r1.verdict)).c_str()));
  c.info(fmt("(c) linear birth: corollary Violated (phi >= q), 1+level with c = 1 %s",
             std::string(to_string(r1.verdict)).c_str()));

  // (d): phi_k = 1/2 + sum_{1<=j<k} 1/q_j - M, M = sum_{j>=1} 1/q_j, q_j = (j+1)^2
  const auto quad = zoo::make("quadratic-birth").model;
  constexpr std::int64_t cap = 10'000;
  const double M = M_PI * M_PI / 6.0 - 1.0;
  std::vector<double> table(cap + 2);
  double partial = 0.0;
  for (std::int64_t k = 0; k <= cap + 1; ++k) {
    if (k >= 2) partial += 1.0 / static_cast<double>(k * k);
    table[k] = 0.5 + partial - M;
  }
  LyapunovCertificate nu;
  nu.kind = CertificateKind::NonUniqueness;
  nu.phi = [&table](const StateVec& s) { return table[static_cast<std::size_t>(s[0])]; };
  nu.c = 1.0;
  nu.bound = 0.5;
  const auto rd = check_nonuniqueness_certificate(quad, nu, cap);
  c.check(rd.verdict == Support::Supported, fmt("(d) %s", std::string(to_string(rd.verdict)).c_str()));
  c.check(rd.violation_count == 0, fmt("(d) %zu violations", rd.violation_count));
  c.info(fmt("(d) quadratic birth, cap %lld: %s, %zu violations", (long long)cap,
             std::string(to_string(rd.verdict)).c_str(), rd.violation_count));
}

// ---- 6 ----

void simulation(Criterion& c) {
  const auto exp2 = zoo::make("exp2-birth").model;
  const auto e = estimate_explosion_probability(exp2, StateVec{0}, {.t_max = 5}, 1000, 12345);
  c.check(e.fraction >= 0.95, fmt("exp2 fraction %.3f", e.fraction));
  c.info(fmt("exp2-birth   %zu/1000 flagged, Wilson [%.4f, %.4f]", e.flagged, e.interval.low, e.interval.high));
  for (const char* name : {"bounded-bd", "linear-birth"}) {
    const auto r = estimate_explosion_probability(zoo::make(name).model, StateVec{0}, {.t_max = 1, .max_jumps = 100'000},
                                                  1000, 12345);
    c.check(r.flagged == 0, fmt("%s flagged %zu", name, r.flagged));
    c.info(fmt("%-12s %zu/1000 flagged", name, r.flagged));
  }

  const auto s2 = zoo::make("schlogl-2").model;
  for (const StateVec& pinned : {StateVec{3, 1}, StateVec{0, 7}}) {
    const double q = total_rate(s2, pinned);
    const auto row = s2.transitions_of(pinned);
    constexpr int n = 20'000;
    double sum = 0.0;
    std::map<StateVec, int> counts;
    for (int t = 0; t < n; ++t) {
      const auto path = simulate_path(s2, pinned, 4242, {.t_max = 1e9, .max_jumps = 1}, t);
      sum += path.jump_times[1];
      ++counts[path.states[1]];
    }
    const double mean = sum / n;
    c.check(std::abs(mean - 1.0 / q) <= 3.0 / q / std::sqrt(n),
            fmt("holding time at %s: mean %.5g vs %.5g", pinned.str().c_str(), mean, 1.0 / q));
    for (const auto& tr : row) {
      const double p = tr.rate / q;
      const double f = static_cast<double>(counts[tr.target]) / n;
      c.check(std::abs(f - p) <= 3.0 * std::sqrt(p * (1 - p) / n),
              fmt("jump %s -> %s: %.4f vs %.4f", pinned.str().c_str(), tr.target.str().c_str(), f, p));
    }
    c.info(fmt("holding time at %s: mean %.5g, 1/q = %.5g; %zu jump targets within 3 sigma", pinned.str().c_str(),
               mean, 1.0 / q, row.size()));
  }
}

// ---- 7 ----

void properties(Criterion& c) {
  const auto fixtures = zoo::grid_fixtures();
  std::size_t states_checked = 0;
  for (const auto& fx : fixtures) {
    const auto& m = fx.model;
    const std::int64_t cap = m.dimension() == 1 ? 400 : 40;
    const auto w = enumerate_window(m, cap);
    const auto w2 = enumerate_window(m, cap + 1);
    const auto f = oracle::random_function(1), g = oracle::random_function(2);
    const double a = 2.5, b = -0.75;
    const StateFunction h = [&](const StateVec& s) { return a * f(s) + b * g(s); };
    for (const auto& s : w.states) {
      ++states_checked;
      // purity and conservativity
      double q = 0.0;
      for (const auto& t : m.transitions_of(s)) {
        c.check(t.target != s, fx.name + ": self-loop at " + s.str());
        c.check(std::isfinite(t.rate) && t.rate > 0.0, fx.name + ": bad rate at " + s.str());
        q += t.rate;
        c.check(t.target.level() <= cap ? w.find(t.target).has_value()
                                        : std::find(w.boundary.begin(), w.boundary.end(), t.target) != w.boundary.end(),
                fx.name + ": target outside window and boundary at " + s.str());
      }
      c.check(std::abs(q - total_rate(m, s)) <= 1e-12 * q, fx.name + ": total rate mismatch at " + s.str());
      c.check(apply_generator(m, [](const StateVec&) { return 1.0; }, s) == 0.0, fx.name + ": row sum at " + s.str());
      // linearity
      const double lhs = apply_generator(m, h, s);
      const double rhs = a * apply_generator(m, f, s) + b * apply_generator(m, g, s);
      c.check(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(rhs), q}), fx.name + ": linearity at " + s.str());
      // nesting
      c.check(w2.find(s).has_value(), fx.name + ": nesting at " + s.str());
    }
    for (const auto& bs : w.boundary) c.check(bs.level() > cap, fx.name + ": boundary level");

    // monotone iteration and bracket validity
    const auto pi = build_embedded(m, 1.0, std::min<std::int64_t>(cap, m.dimension() == 1 ? 200 : 30));
    std::vector<double> prev_up(pi.size(), 1.0), prev_lo(pi.size(), 0.0);
    for (std::size_t it = 1; it <= 40; ++it) {
      const auto br = maximal_solution_bracket(pi, {.tol = 1e-300, .max_iter = it, .tail = fx.tail});
      for (std::size_t i = 0; i < pi.size(); ++i) {
        c.check(br.upper[i] <= prev_up[i], fx.name + ": upper increased");
        c.check(br.lower[i] >= prev_lo[i], fx.name + ": lower decreased");
        c.check(br.lower[i] <= br.upper[i], fx.name + ": lower above upper");
      }
      prev_up = br.upper;
      prev_lo = br.lower;
    }

    // complement identity: mass + upper = 1 on matched windows
    const auto full = maximal_solution_bracket(pi, {.tol = 1e-14, .tail = fx.tail});
    const auto mass = resolvent_mass(pi, 200'000);
    double worst = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) worst = std::max(worst, std::abs(mass.mass[i] + full.upper[i] - 1.0));
    c.check(worst <= 1e-6, fmt("%s: complement identity off by %.3g", fx.name.c_str(), worst));
  }
  c.info(fmt("generator checks on %zu window states across %zu fixtures", states_checked, fixtures.size()));

  // certificate scaling and shift
  const auto s2 = zoo::make("schlogl-2").model;
  const double c0 = *scan_drift_constant(s2, level1, 200);
  for (double alpha : {0.25, 3.0, 1000.0}) {
    const auto r = check_uniqueness_certificate(
        s2, LyapunovCertificate{[alpha](const StateVec& s) { return alpha * level1(s); }, c0}, 200);
    c.check(r.verdict == Support::Supported, fmt("scaling by %g: %s", alpha, std::string(to_string(r.verdict)).c_str()));
  }
  for (double shift : {0.5, 3.0}) {
    const auto r = check_uniqueness_certificate(
        s2, LyapunovCertificate{[shift](const StateVec& s) { return level1(s) + shift; }, c0}, 200);
    c.check(r.verdict == Support::Supported, fmt("shift by %g: %s", shift, std::string(to_string(r.verdict)).c_str()));
  }

  // diffusion is level-neutral: Omega(level) = sum_u birth - death, exhaustively to level 200
  const zoo::SchloglParams p{.sites = 2};
  std::size_t diffusion_moves = 0;
  for (const auto& s : enumerate_window(s2, 200).states) {
    double want = 0.0;
    for (std::size_t u = 0; u < 2; ++u) want += zoo::schlogl_birth(p, s[u]) - zoo::schlogl_death(p, s[u]);
    const double got = apply_generator(s2, [](const StateVec& x) { return static_cast<double>(x.level()); }, s);
    c.check(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)), "level drift at " + s.str());
    for (const auto& t : s2.transitions_of(s)) diffusion_moves += t.target.level() == s.level();
  }
  c.info(fmt("schlogl-2 level drift exact on all states to level 200 (%zu diffusion moves)", diffusion_moves));
}

// ---- 8 ----

template <typename E, typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  } catch (const std::exception& e) {
    return std::string("wrong exception: ") + e.what();
  }
  return "no error";
}

void dsl_suite(Criterion& c) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(models_dir()))
    if (entry.path().extension() == ".qm") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  c.check(files.size() >= 10, fmt("corpus has %zu files", files.size()));
  for (const auto& path : files) {
    const auto spec = dsl::parse_model_file(path);
    const auto again = dsl::parse_model(dsl::pretty_print(spec));
    c.check(dsl::structurally_equal(spec, again), "round trip: " + path);
    c.check(dsl::pretty_print(again) == dsl::pretty_print(spec), "printing not stable: " + path);
  }
  c.info(fmt("%zu corpus files round-trip", files.size()));

  for (const int d : {1, 2, 3}) {
    const auto from_dsl = dsl::instantiate(dsl::parse_model_file(models_dir() + "/schlogl" + std::to_string(d) + ".qm"));
    const auto ctor = zoo::schlogl({.sites = d});
    std::int64_t cap = 0;
    while (simplex_count(d, cap + 1) <= 10'000) ++cap;
    const auto w = enumerate_window(ctor, cap);
    std::size_t transitions = 0;
    for (const auto& s : w.states) {
      const auto a = from_dsl.transitions_of(s), b = ctor.transitions_of(s);
      bool same = a.size() == b.size();
      for (std::size_t k = 0; same && k < a.size(); ++k)
        same = a[k].target == b[k].target && std::abs(a[k].rate - b[k].rate) <= 1e-12 * b[k].rate;
      c.check(same, fmt("schlogl d=%d differs at %s", d, s.str().c_str()));
      transitions += b.size();
    }
    c.info(fmt("schlogl d=%d: %zu states, %zu transitions identical", d, w.size(), transitions));
  }

  const auto contains = [&](const std::string& msg, const std::string& needle, const std::string& what) {
    c.check(msg.find(needle) != std::string::npos, what + ": '" + msg + "'");
  };
  contains(error_of<SyntaxError>([] { dsl::parse_model("model bad\n dim 1\n trans: rate 1"); }), "delta",
           "missing delta");
  try {
    dsl::parse_model("model m\ndim 1\ntrans: delta +e(0) rate 1 $");
    c.check(false, "stray character accepted");
  } catch (const SyntaxError& e) {
    c.check(e.line() == 3 && e.column() == 27, fmt("stray character at %zu:%zu", e.line(), e.column()));
  }
  contains(error_of<SyntaxError>([] { dsl::parse_model("model m\ndim 1\nparam a = 1\nparam a = 2\ntrans: delta +e(0) rate a"); }),
           "duplicate", "duplicate parameter");
  contains(error_of<SyntaxError>([] { dsl::parse_model("model m\ndim 1\ntrans: delta +e(0) rate alpha*x(0)"); }),
           "alpha", "unknown identifier");
  contains(error_of<SyntaxError>([] { dsl::parse_model("model m\ndim 0\ntrans: delta +e(0) rate 1"); }), "dim",
           "zero dimension");
  contains(error_of<SyntaxError>([] { dsl::parse_model("model m\ndim 2\ntrans: delta +e(2) rate 1"); }), "site",
           "site out of range");
  const auto neg = dsl::instantiate(dsl::parse_model("model neg\ndim 1\ntrans: delta +e(0) rate x(0)-5"));
  const auto neg_msg = error_of<ModelError>([&] { neg.transitions_of(StateVec{2}); });
  contains(neg_msg, "-3", "negative rate value");
  contains(neg_msg, "(2)", "negative rate state");
  contains(neg_msg, "line 3", "negative rate line");
  const auto div = dsl::instantiate(dsl::parse_model("model m\ndim 1\ntrans: delta +e(0) rate 1/x(0)"));
  contains(error_of<ModelError>([&] { div.transitions_of(StateVec{0}); }), "division by zero", "division by zero");
  contains(error_of<UsageError>([] { dsl::parse_model_file("/nonexistent/x.qm"); }), "x.qm", "missing file");
}

}  // namespace

int main() {
  omp_set_num_threads(std::max(2, omp_get_max_threads()));
  const std::vector<std::pair<const char*, void (*)(Criterion&)>> criteria = {
      {"pure-birth series verdicts", pure_birth_series},
      {"resolvent brackets against closed forms", resolvent_brackets},
      {"cross-method agreement on the fixture grid", cross_method},
      {"lambda independence", lambda_independence},
      {"certificate fixtures", certificates},
      {"simulation statistics", simulation},
      {"structural properties", properties},
      {"model language", dsl_suite},
  };
  int failed = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c(static_cast<int>(i + 1), criteria[i].first);
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!c.report(secs)) ++failed;
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%zu criteria, %d failed, %.1f s\n", criteria.size(), failed, total);
  return failed == 0 ? 0 : 1;
}
