#include "qmc/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <future>
#include <sstream>

#include "qmc/delta_chain.hpp"
#include "qmc/dsl.hpp"
#include "qmc/error.hpp"
#include "qmc/resolvent.hpp"
#include "qmc/window.hpp"

#ifndef QMC_VERSION
#define QMC_VERSION "0.0.0"
#endif

namespace qmc {

using dsl::instantiate;
using dsl::ModelSpec;
using dsl::parse_model_file;

std::string_view version() { return QMC_VERSION; }

LoadedModel load_model(const ModelSource& source) {
  const bool file = !source.qm_path.empty(), fixture = !source.zoo_name.empty();
  if (file == fixture) throw UsageError("give exactly one of a model file or a zoo name");
  if (file) {
    if (!source.params.empty()) throw UsageError("--param applies to zoo models only");
    const ModelSpec spec = parse_model_file(source.qm_path);
    return {instantiate(spec), nullptr, std::nullopt, source.qm_path, spec.params};
  }
  zoo::Fixture f = zoo::make(source.zoo_name, source.params);
  auto params = f.model.params();
  return {std::move(f.model), std::move(f.tail), std::move(f.nonuniqueness), "zoo:" + f.name,
          std::move(params)};
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Corollary: return "corollary";
    case Method::Embedded: return "embedded";
    case Method::Lyapunov: return "lyapunov";
    case Method::NonUniqueness: return "nonuniqueness";
    case Method::PureBirthSeries: return "pure-birth-series";
    case Method::Resolvent: return "resolvent";
    case Method::Simulate: return "simulate";
  }
  return "?";
}

std::vector<Method> all_methods() {
  return {Method::Corollary, Method::Embedded,  Method::Lyapunov, Method::NonUniqueness,
          Method::PureBirthSeries, Method::Resolvent, Method::Simulate};
}

Method parse_method(std::string_view name) {
  for (auto m : all_methods())
    if (to_string(m) == name) return m;
  throw UsageError("unknown method '" + std::string(name) +
                   "' (lyapunov, corollary, nonuniqueness, resolvent, embedded, simulate, pure-birth-series)");
}

std::string_view to_string(Overall o) {
  switch (o) {
    case Overall::Unique: return "Unique";
    case Overall::NonUnique: return "NonUnique";
    case Overall::Inconclusive: return "Inconclusive";
    case Overall::Contradictory: return "Contradictory";
  }
  return "?";
}

void validate(const AnalysisConfig& c) {
  if (c.methods.empty()) throw UsageError("no analysis method selected");
  if (c.lambdas.empty()) throw UsageError("no lambda value given");
  for (double l : c.lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw UsageError("lambda must be a finite positive number");
  if (c.cap_schedule.empty()) throw UsageError("cap schedule is empty");
  for (std::size_t k = 0; k < c.cap_schedule.size(); ++k) {
    if (c.cap_schedule[k] < 1) throw UsageError("caps must be >= 1");
    if (k > 0 && c.cap_schedule[k] <= c.cap_schedule[k - 1])
      throw UsageError("cap schedule must be strictly increasing");
  }
  const bool sim = std::find(c.methods.begin(), c.methods.end(), Method::Simulate) != c.methods.end();
  if (sim && !c.seed) throw UsageError("the simulate method needs --seed");
  if (sim && c.trials < 1) throw UsageError("trials must be >= 1");
  if (!(c.weights_decay > 0.0 && c.weights_decay < 1.0)) throw UsageError("weights decay must lie in (0, 1)");
}

Overall reconcile(const std::vector<MethodRecord>& records) {
  bool any_unique = false, any_non = false, all_unique = true, any_vote = false;
  for (const auto& r : records) {
    if (r.failed || !r.applicable) continue;
    any_vote = true;
    any_unique = any_unique || r.evidence == Evidence::Unique;
    any_non = any_non || r.evidence == Evidence::NonUnique;
    all_unique = all_unique && r.evidence == Evidence::Unique;
  }
  if (!any_vote) return Overall::Inconclusive;
  if (any_unique && any_non) return Overall::Contradictory;
  if (any_non) return Overall::NonUnique;
  if (all_unique) return Overall::Unique;
  return Overall::Inconclusive;
}

namespace {

Json thresholds_json(const VerdictThresholds& t) {
  return {{"positive", t.positive},
          {"zero", t.zero},
          {"ratio_diverge", t.ratio_diverge},
          {"ratio_converge", t.ratio_converge},
          {"plateau", t.plateau}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Plan {
  const AnalysisConfig& config;
  const LoadedModel& model;
  std::vector<std::int64_t> schedule;  // caps that fit max_window_states
  std::int64_t cert_cap = 0;
  WindowSeries* windows = nullptr;
};

// Drift constant with a stability check: the windowed supremum at cap/2 and
// cap must agree within 1%; the reported c extrapolates the last increment.
struct ScannedC {
  std::optional<double> c;
  double half = 0.0, full = 0.0;
  std::string problem;
};

ScannedC scan_c(const GeneratorModel& m, const StateFunction& phi, std::int64_t cap, Exec exec) {
  ScannedC s;
  const auto a = scan_drift_constant(m, phi, std::max<std::int64_t>(cap / 2, 1), exec);
  const auto b = scan_drift_constant(m, phi, cap, exec);
  if (!a || !b) {
    s.problem = "phi vanishes where its drift is positive";
    return s;
  }
  s.half = *a;
  s.full = *b;
  const double growth = *b - *a;
  if (growth > 0.01 * (1.0 + std::abs(*a))) {
    s.problem = "drift constant keeps growing with the window (" + fmt(*a) + " at cap " +
                std::to_string(cap / 2) + ", " + fmt(*b) + " at cap " + std::to_string(cap) + ")";
    return s;
  }
  s.c = *b + 2.0 * std::max(growth, 0.0);
  return s;
}

Json violations_json(const CertificateReport& r, std::size_t limit = 10) {
  Json out = Json::array();
  for (std::size_t k = 0; k < std::min(limit, r.violations.size()); ++k) {
    const auto& v = r.violations[k];
    out.push_back({{"state", v.state.coords()}, {"condition", v.condition}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  return out;
}

void certificate_details(MethodRecord& rec, const CertificateReport& r, std::int64_t cap,
                         const std::string& phi, const ScannedC* scan) {
  rec.details["phi"] = phi;
  rec.details["c"] = r.c;
  if (scan) rec.details["c_scan"] = {{"half_cap", scan->half}, {"cap", scan->full}};
  rec.details["cap"] = cap;
  rec.details["support"] = to_string(r.verdict);
  rec.details["checked_states"] = r.checked_states;
  rec.details["violation_count"] = r.violation_count;
  rec.details["violations"] = violations_json(r);
  rec.details["growth_trace"] = r.growth_trace;
  rec.details["growth_threshold"] = r.growth_threshold;
  rec.details["notes"] = r.notes;
  std::ostringstream csv;
  csv << "condition,state,lhs,rhs\n";
  for (const auto& v : r.violations) csv << v.condition << ",\"" << v.state.str() << "\"," << fmt(v.lhs) << ',' << fmt(v.rhs) << '\n';
  rec.trace_csv = csv.str();
}

std::optional<CertificateFile> certificate_for(const AnalysisConfig& c, CertificateKind kind) {
  if (!c.certificate_path) return std::nullopt;
  CertificateFile f = parse_certificate_file(*c.certificate_path);
  if (f.kind != kind) return std::nullopt;
  return f;
}

void run_lyapunov(MethodRecord& rec, const Plan& p) {
  const auto& m = p.model.model;
  LyapunovCertificate cert;
  cert.phi = [](const StateVec& s) { return 1.0 + static_cast<double>(s.level()); };
  std::string phi_text = "1 + level";
  std::optional<double> fixed_c;
  if (auto f = certificate_for(p.config, CertificateKind::Uniqueness)) {
    cert = compile_certificate(*f, p.model);
    phi_text = f->phi;
    fixed_c = f->c;
  }
  rec.details["cap"] = p.cert_cap;
  ScannedC scan;
  if (!fixed_c) {
    scan = scan_c(m, cert.phi, p.cert_cap, p.config.exec);
    if (!scan.c) {
      rec.evidence = Evidence::Inconclusive;
      rec.summary = "no drift constant: " + scan.problem;
      rec.details["phi"] = phi_text;
      rec.details["c_scan"] = {{"half_cap", scan.half}, {"cap", scan.full}};
      return;
    }
    cert.c = *scan.c;
  }
  const auto r = check_uniqueness_certificate(m, cert, p.cert_cap, {.exec = p.config.exec});
  certificate_details(rec, r, p.cert_cap, phi_text, fixed_c ? nullptr : &scan);
  rec.evidence = r.verdict == Support::Supported ? Evidence::Unique : Evidence::Inconclusive;
  rec.summary = "phi = " + phi_text + ", c = " + fmt(r.c) + ": " + std::string(to_string(r.verdict)) +
                " on cap " + std::to_string(p.cert_cap);
}

void run_corollary(MethodRecord& rec, const Plan& p) {
  const auto& m = p.model.model;
  StateFunction phi = [&m](const StateVec& s) { return 1.0 + total_rate(m, s); };
  std::string phi_text = "1 + q";
  std::optional<double> fixed_c;
  if (auto f = certificate_for(p.config, CertificateKind::CorollaryUniqueness)) {
    phi = compile_certificate(*f, p.model).phi;
    phi_text = f->phi;
    fixed_c = f->c;
  }
  rec.details["cap"] = p.cert_cap;
  ScannedC scan;
  double c = fixed_c.value_or(0.0);
  if (!fixed_c) {
    scan = scan_c(m, phi, p.cert_cap, p.config.exec);
    if (!scan.c) {
      rec.evidence = Evidence::Inconclusive;
      rec.summary = "no drift constant: " + scan.problem;
      rec.details["phi"] = phi_text;
      rec.details["c_scan"] = {{"half_cap", scan.half}, {"cap", scan.full}};
      return;
    }
    c = *scan.c;
  }
  const auto r = check_corollary_certificate(m, phi, c, p.cert_cap, {.exec = p.config.exec});
  certificate_details(rec, r, p.cert_cap, phi_text, fixed_c ? nullptr : &scan);
  rec.evidence = r.verdict == Support::Supported ? Evidence::Unique : Evidence::Inconclusive;
  rec.summary = "phi = " + phi_text + ", c = " + fmt(c) + ": " + std::string(to_string(r.verdict)) +
                " on cap " + std::to_string(p.cert_cap);
}

void run_nonuniqueness(MethodRecord& rec, const Plan& p) {
  LyapunovCertificate cert;
  cert.kind = CertificateKind::NonUniqueness;
  std::string phi_text;
  if (auto f = certificate_for(p.config, CertificateKind::NonUniqueness)) {
    cert = compile_certificate(*f, p.model);
    if (!f->c) cert.c = 1.0;
    phi_text = f->phi;
  } else if (p.model.nonuniqueness) {
    cert.phi = p.model.nonuniqueness->phi;
    cert.bound = p.model.nonuniqueness->bound;
    cert.c = p.model.nonuniqueness->c;
    phi_text = "1/2 - sum_{j >= max(k,1)} 1/q_j (zoo)";
  } else {
    rec.applicable = false;
    rec.summary = "no non-uniqueness certificate available (supply one with --cert)";
    return;
  }
  std::int64_t cap = p.cert_cap;
  std::string cap_note;
  if (phi_text.ends_with("(zoo)") && p.model.nonuniqueness->max_cap > 0 && cap > p.model.nonuniqueness->max_cap) {
    cap = p.model.nonuniqueness->max_cap;
    cap_note = "cap lowered to " + std::to_string(cap) + ", where phi still resolves in double precision";
  }
  auto r = check_nonuniqueness_certificate(p.model.model, cert, cap, {.exec = p.config.exec});
  if (!cap_note.empty()) r.notes.push_back(cap_note);
  certificate_details(rec, r, cap, phi_text, nullptr);
  rec.details["bound"] = *cert.bound;
  rec.evidence = r.verdict == Support::Supported ? Evidence::NonUnique : Evidence::Inconclusive;
  rec.summary = "phi = " + phi_text + ", c = " + fmt(cert.c) + ": " + std::string(to_string(r.verdict)) +
                " on cap " + std::to_string(cap);
}

void chain_details(MethodRecord& rec, const std::vector<ChainVerdict>& verdicts, const Plan& p) {
  rec.details["thresholds"] = thresholds_json(p.config.thresholds);
  rec.details["cap_schedule"] = p.schedule;
  Json per = Json::array();
  std::ostringstream csv;
  csv << "lambda,cap,states,lower,upper,gap,iterations,converged\n";
  for (const auto& v : verdicts) {
    Json trace = Json::array();
    for (const auto& r : v.trace) {
      trace.push_back({{"cap", r.cap}, {"states", r.states}, {"lower", r.lower}, {"upper", r.upper},
                       {"gap", r.gap}, {"iterations", r.iterations}, {"converged", r.converged}});
      csv << fmt(v.lambda) << ',' << r.cap << ',' << r.states << ',' << fmt(r.lower) << ',' << fmt(r.upper)
          << ',' << fmt(r.gap) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
    per.push_back({{"lambda", v.lambda}, {"evidence", to_string(v.evidence)}, {"rule", v.rule},
                   {"notes", v.notes}, {"trace", trace}});
  }
  rec.details["per_lambda"] = per;
  rec.trace_csv = csv.str();

  rec.evidence = verdicts.front().evidence;
  bool same = true;
  for (const auto& v : verdicts) same = same && v.evidence == rec.evidence;
  if (!same) {
    rec.evidence = Evidence::Inconclusive;
    rec.summary = "verdict differs between lambda values";
  } else {
    rec.summary = std::string(to_string(rec.evidence)) + " at every lambda; " + verdicts.front().rule;
  }
}

void run_resolvent(MethodRecord& rec, const Plan& p) {
  ChainVerdictOptions o;
  o.cap_schedule = p.schedule;
  o.max_window_states = p.config.max_window_states;
  o.thresholds = p.config.thresholds;
  o.bracket.exec = p.config.exec;
  o.bracket.tail = p.model.tail;
  o.windows = p.windows;
  std::vector<ChainVerdict> out;
  for (double l : p.config.lambdas) out.push_back(uniqueness_verdict_resolvent(p.model.model, l, o));
  chain_details(rec, out, p);
}

void run_embedded(MethodRecord& rec, const Plan& p) {
  EmbeddedVerdictOptions o;
  o.cap_schedule = p.schedule;
  o.max_window_states = p.config.max_window_states;
  o.thresholds = p.config.thresholds;
  o.weights_decay = p.config.weights_decay;
  o.bracket.exec = p.config.exec;
  o.bracket.tail = p.model.tail;
  o.windows = p.windows;
  std::vector<ChainVerdict> out;
  for (double l : p.config.lambdas) out.push_back(uniqueness_verdict_embedded(p.model.model, l, o));
  chain_details(rec, out, p);
  rec.details["weights_decay"] = p.config.weights_decay;
}

void run_simulate(MethodRecord& rec, const Plan& p) {
  const auto& c = p.config;
  const auto e = estimate_explosion_probability(p.model.model, StateVec::zeros(p.model.model.dimension()),
                                                c.simulation, c.trials, *c.seed, c.epsilon, c.exec);
  rec.details = {{"trials", e.trials},       {"flagged", e.flagged},
                 {"fraction", e.fraction},   {"wilson95", {e.interval.low, e.interval.high}},
                 {"absorbed", e.absorbed},   {"time_capped", e.time_capped},
                 {"jump_capped", e.jump_capped}, {"overflowed", e.overflowed},
                 {"t_max", e.caps.t_max},    {"max_jumps", e.caps.max_jumps},
                 {"epsilon", e.epsilon},     {"seed", e.seed}};
  std::ostringstream csv;
  csv << "trials,flagged,fraction,wilson_low,wilson_high,absorbed,time_capped,jump_capped,overflowed\n"
      << e.trials << ',' << e.flagged << ',' << fmt(e.fraction) << ',' << fmt(e.interval.low) << ','
      << fmt(e.interval.high) << ',' << e.absorbed << ',' << e.time_capped << ',' << e.jump_capped << ','
      << e.overflowed << '\n';
  rec.trace_csv = csv.str();
  // Any summable path counts against uniqueness; none found is weak evidence for it.
  rec.evidence = e.flagged > 0 ? Evidence::NonUnique : Evidence::Unique;
  rec.summary = std::to_string(e.flagged) + "/" + std::to_string(e.trials) + " paths flagged explosive";
  if (e.flagged == 0) rec.summary += " (low confidence)";
}

void run_series(MethodRecord& rec, const Plan& p) {
  const auto& m = p.model.model;
  std::int64_t n_max = p.config.series_n_max;
  rec.details["n_max_requested"] = n_max;
  if (m.dimension() != 1) {
    rec.applicable = false;
    rec.summary = "not applicable: model is not one-dimensional";
    return;
  }
  std::vector<double> rate;
  rate.reserve(static_cast<std::size_t>(n_max) + 1);
  for (std::int64_t n = 0; n <= n_max; ++n) {
    std::vector<Transition> row;
    try {
      row = m.transitions_of(StateVec{n});
    } catch (const RateOverflowError& e) {
      if (n - 1 < 1000) throw;
      n_max = n - 1;
      rec.details["truncated"] = std::string("rates overflow at state ") + std::to_string(n);
      break;
    }
    if (row.size() != 1 || row.front().target != StateVec{n + 1}) {
      rec.applicable = false;
      rec.summary = "not applicable: state " + std::to_string(n) + " is not a pure-birth state";
      return;
    }
    rate.push_back(row.front().rate);
  }
  const auto v = pure_birth_verdict([&](std::int64_t n) { return rate[static_cast<std::size_t>(n)]; }, n_max);
  rec.evidence = v.evidence;
  rec.details["n_max"] = n_max;
  rec.details["series"] = to_string(v.series.verdict);
  rec.details["slope"] = v.series.slope;
  rec.details["slope_halfwidth"] = v.series.halfwidth;
  rec.details["beta"] = v.series.beta ? Json(*v.series.beta) : Json(nullptr);
  rec.details["partial_sum"] = v.series.partial_sum;
  rec.summary = "sum 1/q " + std::string(to_string(v.series.verdict)) + " (slope " + fmt(v.series.slope) +
                (v.series.beta ? ", beta " + fmt(*v.series.beta) : std::string()) + ")";
  std::ostringstream csv;
  csv << "n_max,slope,halfwidth,beta,partial_sum,verdict\n"
      << n_max << ',' << fmt(v.series.slope) << ',' << fmt(v.series.halfwidth) << ','
      << (v.series.beta ? fmt(*v.series.beta) : "") << ',' << fmt(v.series.partial_sum) << ','
      << to_string(v.series.verdict) << '\n';
  rec.trace_csv = csv.str();
}

MethodRecord run_method(Method m, const Plan& p) {
  MethodRecord rec;
  rec.method = m;
  rec.details = Json::object();
  try {
    switch (m) {
      case Method::Lyapunov: run_lyapunov(rec, p); break;
      case Method::Corollary: run_corollary(rec, p); break;
      case Method::NonUniqueness: run_nonuniqueness(rec, p); break;
      case Method::Resolvent: run_resolvent(rec, p); break;
      case Method::Embedded: run_embedded(rec, p); break;
      case Method::Simulate: run_simulate(rec, p); break;
      case Method::PureBirthSeries: run_series(rec, p); break;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.model_error = dynamic_cast<const ModelError*>(&e) != nullptr;
    rec.error = e.what();
    rec.evidence = Evidence::Inconclusive;
    rec.summary = "failed: " + rec.error;
  }
  return rec;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json config_json(const AnalysisConfig& c, const Plan& p) {
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  Json j;
  j["source"] = p.model.source;
  j["methods"] = methods;
  j["lambdas"] = c.lambdas;
  j["cap_schedule"] = c.cap_schedule;
  j["effective_cap_schedule"] = p.schedule;
  j["max_window_states"] = c.max_window_states;
  j["certificate_cap"] = p.cert_cap;
  j["thresholds"] = thresholds_json(c.thresholds);
  j["weights_decay"] = c.weights_decay;
  j["simulation"] = {{"t_max", c.simulation.t_max},
                     {"max_jumps", c.simulation.max_jumps},
                     {"trials", c.trials},
                     {"seed", c.seed ? Json(*c.seed) : Json(nullptr)},
                     {"epsilon", c.epsilon}};
  j["certificate"] = c.certificate_path ? Json(*c.certificate_path) : Json(nullptr);
  j["series_n_max"] = c.series_n_max;
  return j;
}

}  // namespace

AnalysisResult run_analysis(const AnalysisConfig& config) {
  validate(config);
  const LoadedModel model = load_model(config.source);
  return run_analysis(config, model);
}

AnalysisResult run_analysis(const AnalysisConfig& config, const LoadedModel& model) {
  validate(config);
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end(),
            [](Method a, Method b) { return to_string(a) < to_string(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  AnalysisResult result;
  Plan plan{config, model, {}, 0, nullptr};
  const std::size_t d = model.model.dimension();
  try {
    plan.schedule = trim_schedule(config.cap_schedule, d, config.max_window_states);
  } catch (const ResourceError&) {
    throw UsageError("every cap in the schedule exceeds the window state limit of " +
                     std::to_string(config.max_window_states));
  }
  if (plan.schedule.size() < config.cap_schedule.size())
    result.notes.push_back("caps above " + std::to_string(plan.schedule.back()) + " dropped (more than " +
                           std::to_string(config.max_window_states) + " states)");
  plan.cert_cap = config.certificate_cap > 0 ? config.certificate_cap : plan.schedule.back();
  WindowSeries windows(model.model, config.exec, config.max_window_states);
  plan.windows = &windows;

  if (config.parallel_methods) {
    std::vector<std::future<MethodRecord>> jobs;
    for (auto m : methods) jobs.push_back(std::async(std::launch::async, [m, &plan] { return run_method(m, plan); }));
    for (auto& j : jobs) result.methods.push_back(j.get());
  } else {
    for (auto m : methods) result.methods.push_back(run_method(m, plan));
  }

  result.overall = reconcile(result.methods);
  auto supports = [&](Evidence e, bool analytic) {
    for (const auto& r : result.methods)
      if (!r.failed && r.applicable && r.evidence == e && (r.method != Method::Simulate) == analytic) return true;
    return false;
  };
  if (result.overall == Overall::Unique || result.overall == Overall::NonUnique) {
    const Evidence e = result.overall == Overall::Unique ? Evidence::Unique : Evidence::NonUnique;
    result.confidence = supports(e, true) ? "analytic" : "simulation-only";
  }
  for (const auto& r : result.methods)
    if (r.failed) result.notes.push_back(std::string(to_string(r.method)) + " failed and did not vote");

  Json& rep = result.report;
  rep["model"] = {{"name", model.model.name()}, {"source", model.source}, {"dimension", d}};
  Json params = Json::object();
  for (const auto& [k, v] : model.params) params[k] = v;
  rep["model"]["params"] = params;
  rep["config"] = config_json(config, plan);
  rep["verdict"] = {{"overall", to_string(result.overall)},
                    {"confidence", result.confidence.empty() ? Json(nullptr) : Json(result.confidence)},
                    {"notes", result.notes}};
  Json ms = Json::array();
  for (const auto& r : result.methods) {
    Json m = {{"method", to_string(r.method)},
              {"status", r.failed ? "failed" : r.applicable ? "ok" : "not-applicable"},
              {"evidence", to_string(r.evidence)},
              {"summary", r.summary}};
    if (r.failed) m["error"] = r.error;
    m["details"] = r.details;
    ms.push_back(std::move(m));
  }
  rep["methods"] = ms;
  rep["provenance"] = {{"version", version()}, {"config_hash", config_hash(rep["config"])}};
  if (config.timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    rep["provenance"]["timestamp"] = buf;
  }
  return result;
}

std::string render_text(const AnalysisResult& r) {
  std::ostringstream os;
  const auto& m = r.report["model"];
  os << "model    " << m["name"].get<std::string>() << " (" << m["source"].get<std::string>() << ", d = "
     << m["dimension"].get<std::size_t>() << ")\n";
  os << "verdict  " << to_string(r.overall);
  if (!r.confidence.empty()) os << " [" << r.confidence << "]";
  os << "\n\n";
  for (const auto& rec : r.methods) {
    char line[64];
    std::snprintf(line, sizeof line, "  %-18s %-13s", std::string(to_string(rec.method)).c_str(),
                  rec.failed ? "Failed" : !rec.applicable ? "n/a" : std::string(to_string(rec.evidence)).c_str());
    os << line << rec.summary << '\n';
  }
  for (const auto& n : r.notes) os << "\nnote: " << n;
  if (!r.notes.empty()) os << '\n';
  return os.str();
}

}  // namespace qmc
